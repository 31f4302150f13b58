// Python bindings: the CP-ABE engines, the hybrid chain mode, the policy
// language, and the deterministic simulation harness.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "abestore/abe/chain.hpp"
#include "abestore/harness/harness.hpp"

namespace py = pybind11;
using namespace abestore;

namespace {

// Opaque master-key holder: deliberately no to_bytes — the master key
// never leaves the authority process.
struct MasterKeyHolder {
    abe::AbeMasterKey mk;
};

const abe::AbeEngine& resolve_engine(const std::string& name) {
    if (name == "mock") return abe::mock_engine();
    if (name == "pairing") return abe::pairing_engine();
    return abe::engine_for(name);  // full scheme id
}

// seed=None -> OS randomness; seed=int -> reproducible stream.
std::unique_ptr<RandomSource> make_rng(std::optional<uint64_t> seed) {
    if (seed) return std::make_unique<Drbg>(*seed);
    return std::make_unique<SystemRandom>();
}

std::vector<abe::AttributeId> current_ids(const abe::AbePublicParams& pk,
                                          const std::vector<std::string>& names) {
    std::vector<abe::AttributeId> out;
    for (const std::string& n : names) {
        const abe::AttributeRepresentation* rep = pk.find(n);
        if (!rep) throw ProtocolError(ErrorCode::Malformed, "attribute not in universe: " + n);
        out.push_back(rep->id);
    }
    return out;
}

py::bytes to_py(const Bytes& b) {
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

Bytes from_py(const py::bytes& b) {
    std::string_view v = b;
    return Bytes(v.begin(), v.end());
}

py::dict report_to_dict(const harness::CompromiseReport& r) {
    py::dict d;
    d["asset"] = r.asset;
    d["occurred"] = r.occurred;
    d["local"] = r.local;
    d["forward"] = r.forward;
    d["online_recoverable"] = r.online_recoverable;
    d["recovery_steps"] = r.recovery_steps;
    return d;
}

py::dict op_to_dict(const harness::SimNet::OpResult& r) {
    py::dict d;
    d["ok"] = r.ok;
    d["code"] = std::string(error_code_name(r.code));
    d["message"] = r.message;
    d["data"] = to_py(r.data);
    return d;
}

}  // namespace

PYBIND11_MODULE(_abestore, m) {
    m.doc() = "attribute-based storage protocol: CP-ABE engines, policy "
              "language, and simulation harness";

    // Exceptions ----------------------------------------------------------
    static py::exception<ProtocolError> exc_protocol(m, "ProtocolError");
    static py::exception<AbeDecryptError> exc_decrypt(m, "DecryptError", exc_protocol);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const AbeDecryptError& e) {
            PyErr_SetString(exc_decrypt.ptr(), e.what());
        } catch (const ProtocolError& e) {
            PyErr_SetString(exc_protocol.ptr(), e.what());
        }
    });

    // Serializable artifacts ----------------------------------------------
    py::class_<abe::AbePublicParams>(m, "PublicParams")
        .def_property_readonly("scheme",
                               [](const abe::AbePublicParams& p) { return p.scheme; })
        .def_property_readonly("universe",
                               [](const abe::AbePublicParams& p) {
                                   std::vector<std::pair<std::string, uint32_t>> out;
                                   for (const abe::AttributeRepresentation& rep : p.universe)
                                       out.emplace_back(rep.id.name, rep.id.epoch);
                                   return out;
                               })
        .def("to_bytes", [](const abe::AbePublicParams& p) { return to_py(p.serialize()); })
        .def_static("from_bytes", [](const py::bytes& b) {
            return abe::AbePublicParams::deserialize(from_py(b));
        });

    py::class_<MasterKeyHolder>(m, "MasterKey");

    py::class_<abe::AbePrivateKey>(m, "PrivateKey")
        .def_property_readonly("attributes",
                               [](const abe::AbePrivateKey& k) {
                                   std::vector<std::pair<std::string, uint32_t>> out;
                                   for (const abe::AttributeId& id : k.attrs)
                                       out.emplace_back(id.name, id.epoch);
                                   return out;
                               })
        .def("to_bytes", [](const abe::AbePrivateKey& k) { return to_py(k.serialize()); })
        .def_static("from_bytes", [](const py::bytes& b) {
            return abe::AbePrivateKey::deserialize(from_py(b));
        });

    py::class_<abe::AbeCiphertext>(m, "Ciphertext")
        .def_property_readonly("policy",
                               [](const abe::AbeCiphertext& c) { return policy::serialize(c.policy); })
        .def("to_bytes", [](const abe::AbeCiphertext& c) { return to_py(c.serialize()); })
        .def_static("from_bytes", [](const py::bytes& b) {
            return abe::AbeCiphertext::deserialize(from_py(b));
        });

    py::class_<abe::ChainCiphertext>(m, "ChainCiphertext")
        .def("to_bytes", [](const abe::ChainCiphertext& c) { return to_py(c.serialize()); })
        .def_static("from_bytes", [](const py::bytes& b) {
            return abe::ChainCiphertext::deserialize(from_py(b));
        });

    // Engine --------------------------------------------------------------
    py::class_<abe::AbeEngine, std::unique_ptr<abe::AbeEngine, py::nodelete>>(m, "Engine")
        .def(py::init([](const std::string& name) {
                 return std::unique_ptr<abe::AbeEngine, py::nodelete>(
                     const_cast<abe::AbeEngine*>(&resolve_engine(name)));
             }),
             py::arg("scheme"))
        .def_property_readonly("scheme", &abe::AbeEngine::scheme)
        .def_property_readonly("block_capacity", &abe::AbeEngine::block_capacity)
        .def(
            "setup",
            [](const abe::AbeEngine& e, const std::vector<std::string>& attrs,
               std::optional<uint64_t> seed) {
                abe::AbeSystemConfig cfg;
                for (const std::string& a : attrs)
                    cfg.universe.push_back({a, abe::AttributeRole::Generic, 0});
                auto rng = make_rng(seed);
                auto [pk, mk] = e.setup(cfg, *rng);
                return py::make_tuple(pk, MasterKeyHolder{std::move(mk)});
            },
            py::arg("attributes"), py::arg("seed") = py::none())
        .def(
            "keygen",
            [](const abe::AbeEngine& e, const abe::AbePublicParams& pk,
               const MasterKeyHolder& mk, const std::vector<std::string>& attrs,
               std::optional<uint64_t> seed) {
                auto rng = make_rng(seed);
                return e.generate_key(pk, mk.mk, current_ids(pk, attrs), *rng);
            },
            py::arg("pk"), py::arg("mk"), py::arg("attributes"), py::arg("seed") = py::none())
        .def(
            "encrypt",
            [](const abe::AbeEngine& e, const abe::AbePublicParams& pk,
               const py::bytes& message, const std::string& policy_text,
               std::optional<uint64_t> seed) {
                auto rng = make_rng(seed);
                return e.encrypt(pk, from_py(message), policy::parse(policy_text), *rng);
            },
            py::arg("pk"), py::arg("message"), py::arg("policy"), py::arg("seed") = py::none())
        .def(
            "decrypt",
            [](const abe::AbeEngine& e, const abe::AbePublicParams& pk,
               const abe::AbeCiphertext& c, const abe::AbePrivateKey& sk) {
                return to_py(e.decrypt(pk, c, sk));
            },
            py::arg("pk"), py::arg("ciphertext"), py::arg("key"))
        .def(
            "encrypt_chain",
            [](const abe::AbeEngine& e, const abe::AbePublicParams& pk,
               const py::bytes& data, const std::string& policy_text,
               std::optional<uint64_t> seed, uint32_t chunk_size) {
                auto rng = make_rng(seed);
                return abe::encrypt_chain(e, pk, from_py(data), policy::parse(policy_text),
                                          *rng, chunk_size);
            },
            py::arg("pk"), py::arg("data"), py::arg("policy"), py::arg("seed") = py::none(),
            py::arg("chunk_size") = abe::kDefaultChunkSize)
        .def(
            "decrypt_chain",
            [](const abe::AbeEngine& e, const abe::AbePublicParams& pk,
               const abe::ChainCiphertext& c, const abe::AbePrivateKey& sk) {
                return to_py(abe::decrypt_chain(e, pk, c, sk));
            },
            py::arg("pk"), py::arg("ciphertext"), py::arg("key"))
        .def(
            "reissue_attribute",
            [](const abe::AbeEngine& e, abe::AbePublicParams& pk, MasterKeyHolder& mk,
               const std::string& name) { e.reissue_attribute(pk, mk.mk, name); },
            py::arg("pk"), py::arg("mk"), py::arg("name"),
            "Rotates the attribute's epoch; existing keys stop decrypting "
            "fresh ciphertexts that use it.")
        .def(
            "add_attribute",
            [](const abe::AbeEngine& e, abe::AbePublicParams& pk, MasterKeyHolder& mk,
               const std::string& name) {
                e.add_attribute(pk, mk.mk, {name, abe::AttributeRole::Generic, 0});
            },
            py::arg("pk"), py::arg("mk"), py::arg("name"));

    // Policy language ------------------------------------------------------
    m.def(
        "policy_canonical",
        [](const std::string& text) { return policy::serialize(policy::parse(text)); },
        py::arg("text"), "Parses an access policy and returns its canonical form.");
    m.def(
        "policy_satisfies",
        [](const std::vector<std::string>& attrs, const std::string& text) {
            return policy::satisfies(policy::AttributeSet(attrs.begin(), attrs.end()),
                                     policy::parse(text));
        },
        py::arg("attributes"), py::arg("policy"));

    // Harness ---------------------------------------------------------------
    py::class_<harness::SimNet>(m, "SimNet")
        .def(py::init<uint64_t>(), py::arg("seed"))
        .def("init", &harness::SimNet::init, py::arg("engine"), py::arg("x") = 4,
             py::arg("u") = 2, py::arg("ttl_max") = 900,
             py::arg("attributes") = std::vector<std::string>{})
        .def("add_authz", &harness::SimNet::add_authz, py::arg("alias"), py::arg("attributes"))
        .def("add_service", &harness::SimNet::add_service, py::arg("alias"))
        .def("enroll", &harness::SimNet::enroll, py::arg("name"), py::arg("attributes"),
             py::arg("validity"))
        .def(
            "authenticate",
            [](harness::SimNet& n, const std::string& c, const std::string& node,
               const std::vector<std::string>& attrs, const std::vector<std::string>& validity,
               uint64_t ttl) { return op_to_dict(n.authenticate(c, node, attrs, validity, ttl)); },
            py::arg("consumer"), py::arg("node"), py::arg("attributes"), py::arg("validity"),
            py::arg("ttl") = 600)
        .def(
            "put",
            [](harness::SimNet& n, const std::string& c, const std::string& node,
               const std::string& id, const std::string& policy_text, const py::bytes& data) {
                return op_to_dict(n.put(c, node, id, policy_text, from_py(data)));
            },
            py::arg("consumer"), py::arg("node"), py::arg("id"), py::arg("policy"),
            py::arg("data"))
        .def(
            "get",
            [](harness::SimNet& n, const std::string& c, const std::string& node,
               const std::string& id, std::optional<std::pair<uint64_t, uint64_t>> range) {
                std::optional<client::ByteRange> r;
                if (range) r = client::ByteRange{range->first, range->second};
                return op_to_dict(n.get(c, node, id, r));
            },
            py::arg("consumer"), py::arg("node"), py::arg("id"), py::arg("range") = py::none())
        .def(
            "write",
            [](harness::SimNet& n, const std::string& c, const std::string& node,
               const std::string& id, uint64_t offset, const py::bytes& data) {
                return op_to_dict(n.write(c, node, id, offset, from_py(data)));
            },
            py::arg("consumer"), py::arg("node"), py::arg("id"), py::arg("offset"),
            py::arg("data"))
        .def("advance_clock", &harness::SimNet::advance_clock, py::arg("seconds"))
        .def("revoke_validity",
             [](harness::SimNet& n, const std::string& attr) { n.revoke_validity(attr); })
        .def("recover_node", &harness::SimNet::recover_node, py::arg("alias"))
        .def("remove_consumer", &harness::SimNet::remove_consumer, py::arg("name"))
        .def("transcript_digest",
             [](const harness::SimNet& n) { return n.transcript().dump(); })
        .def("transcript_bytes",
             [](const harness::SimNet& n) { return to_py(n.transcript().flatten()); });

    m.def(
        "run_scenario_file",
        [](const std::string& path) {
            harness::ScenarioResult res = harness::run_scenario_file(path);
            py::dict d;
            d["log"] = res.log;
            d["transcript_digest"] = res.transcript.dump();
            py::list reports;
            for (const harness::CompromiseReport& r : res.reports)
                reports.append(report_to_dict(r));
            d["reports"] = reports;
            return d;
        },
        py::arg("path"));
    m.def("run_scenario", [](const std::string& script) {
        harness::ScenarioResult res = harness::run_scenario(script);
        py::dict d;
        d["log"] = res.log;
        d["transcript_digest"] = res.transcript.dump();
        py::list reports;
        for (const harness::CompromiseReport& r : res.reports)
            reports.append(report_to_dict(r));
        d["reports"] = reports;
        return d;
    });
}

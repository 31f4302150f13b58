#include <algorithm>
#include <fstream>
#include <sstream>

#include "abestore/harness/harness.hpp"

namespace abestore::harness {

namespace {

// One parsed script line: a command, positional arguments, and key=value
// options (values may be double-quoted to carry spaces).
struct Line {
    size_t no = 0;
    std::string cmd;
    std::vector<std::string> args;
    std::map<std::string, std::string> opts;
};

std::vector<std::string> tokenize(const std::string& text, size_t line_no) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false, have = false;
    for (char ch : text) {
        if (quoted) {
            if (ch == '"')
                quoted = false;
            else
                cur += ch;
        } else if (ch == '"') {
            quoted = true;
            have = true;
        } else if (ch == ' ' || ch == '\t') {
            if (have) out.push_back(cur);
            cur.clear();
            have = false;
        } else if (ch == '#') {
            break;
        } else {
            cur += ch;
            have = true;
        }
    }
    if (quoted)
        throw ProtocolError(ErrorCode::Malformed,
                            "scenario line " + std::to_string(line_no) + ": unterminated quote");
    if (have) out.push_back(cur);
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : v) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

Bytes pattern_data(size_t n, uint64_t seed) {
    Bytes out(n);
    uint64_t s = seed * 0x9e3779b97f4a7c15ull + 1;
    for (size_t i = 0; i < n; ++i) {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        out[i] = uint8_t(s >> 56);
    }
    return out;
}

class Runner {
public:
    ScenarioResult run(const std::string& script) {
        std::istringstream in(script);
        std::string raw;
        size_t no = 0;
        while (std::getline(in, raw)) {
            ++no;
            std::vector<std::string> toks = tokenize(raw, no);
            if (toks.empty()) continue;
            Line line;
            line.no = no;
            line.cmd = toks[0];
            for (size_t i = 1; i < toks.size(); ++i) {
                size_t eq = toks[i].find('=');
                if (eq == std::string::npos)
                    line.args.push_back(toks[i]);
                else
                    line.opts[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
            }
            exec(line);
            result_.log.push_back(std::to_string(no) + ": " + line.cmd + " ok");
        }
        if (net_) result_.transcript = net_->transcript();
        result_.reports = std::move(reports_);
        return std::move(result_);
    }

private:
    [[noreturn]] void fail(const Line& l, const std::string& why) {
        throw ProtocolError(ErrorCode::Internal,
                            "scenario line " + std::to_string(l.no) + " (" + l.cmd + "): " + why);
    }

    SimNet& world(const Line& l) {
        if (!net_) fail(l, "no init yet");
        return *net_;
    }

    std::string opt(const Line& l, const std::string& key, const std::string& dflt = "") const {
        auto it = l.opts.find(key);
        return it == l.opts.end() ? dflt : it->second;
    }

    uint64_t num(const Line& l, const std::string& key, uint64_t dflt) const {
        auto it = l.opts.find(key);
        return it == l.opts.end() ? dflt : std::stoull(it->second);
    }

    const std::string& arg(const Line& l, size_t i) {
        if (i >= l.args.size()) fail(l, "missing argument " + std::to_string(i + 1));
        return l.args[i];
    }

    void check(const Line& l, const SimNet::OpResult& res) {
        std::string want = opt(l, "expect", "ok");
        if (want == "ok") {
            if (!res.ok)
                fail(l, std::string("expected success, got ") + error_code_name(res.code) +
                            ": " + res.message);
            return;
        }
        if (res.ok) fail(l, "expected " + want + ", got success");
        if (want != error_code_name(res.code))
            fail(l, "expected " + want + ", got " + error_code_name(res.code) + ": " +
                        res.message);
    }

    Bytes payload(const Line& l) {
        if (auto it = l.opts.find("data"); it != l.opts.end())
            return to_bytes(it->second);
        size_t n = num(l, "size", 64);
        return pattern_data(n, seed_ * 1000003 + l.no);
    }

    net::TamperHook make_tamper(const Line& l, const std::string& mode) {
        // Default: leave the key-exchange frame alone so the attack lands on
        // protected traffic, where detection is the claim under test.
        size_t skip = num(l, "skip", 1);
        auto count = std::make_shared<size_t>(0);
        if (mode == "flip") {
            return [count, skip](const Bytes& chunk) -> std::optional<Bytes> {
                size_t i = (*count)++;
                if (i < skip || chunk.empty()) return chunk;
                Bytes out = chunk;
                out[out.size() / 2] ^= 0x01;
                return out;
            };
        }
        if (mode == "replay") {
            auto prev = std::make_shared<Bytes>();
            return [count, skip, prev](const Bytes& chunk) -> std::optional<Bytes> {
                size_t i = (*count)++;
                if (i < skip) return chunk;
                if (prev->empty()) {
                    *prev = chunk;
                    return chunk;
                }
                return *prev;  // old frame delivered in place of the new one
            };
        }
        fail(l, "unknown tamper mode " + mode);
    }

    void exec(const Line& l) {
        const std::string& c = l.cmd;

        if (c == "seed") {
            seed_ = std::stoull(arg(l, 0));
        } else if (c == "init") {
            net_ = std::make_unique<SimNet>(seed_);
            net_->init(opt(l, "engine", "mock"), uint32_t(num(l, "x", 4)),
                       uint32_t(num(l, "u", 2)), num(l, "ttl", 900),
                       split_list(opt(l, "generics")));
        } else if (c == "authz") {
            world(l).add_authz(arg(l, 0), split_list(opt(l, "attrs")));
        } else if (c == "service") {
            world(l).add_service(arg(l, 0));
        } else if (c == "enroll") {
            world(l).enroll(arg(l, 0), split_list(opt(l, "attrs")),
                          split_list(opt(l, "validity")));
        } else if (c == "auth") {
            check(l, world(l).authenticate(arg(l, 0), arg(l, 1), split_list(opt(l, "attrs")),
                                         split_list(opt(l, "validity")), num(l, "ttl", 600)));
        } else if (c == "put") {
            std::string id = opt(l, "id");
            Bytes data = payload(l);
            SimNet::OpResult res =
                world(l).put(arg(l, 0), arg(l, 1), id, opt(l, "policy"), data);
            check(l, res);
            if (res.ok) contents_[id] = data;
        } else if (c == "get") {
            std::string id = opt(l, "id");
            std::optional<client::ByteRange> range;
            if (l.opts.count("offset") || l.opts.count("length"))
                range = client::ByteRange{num(l, "offset", 0), num(l, "length", 0)};
            SimNet::OpResult res = world(l).get(arg(l, 0), arg(l, 1), id, range);
            check(l, res);
            if (res.ok && contents_.count(id)) {
                const Bytes& full = contents_[id];
                Bytes want = full;
                if (range) {
                    if (range->offset + range->length > full.size())
                        fail(l, "range oracle out of bounds");
                    want = Bytes(full.begin() + long(range->offset),
                                 full.begin() + long(range->offset + range->length));
                }
                if (res.data != want) fail(l, "returned data does not match the oracle");
            }
        } else if (c == "write") {
            std::string id = opt(l, "id");
            uint64_t offset = num(l, "offset", 0);
            Bytes data = payload(l);
            SimNet::OpResult res = world(l).write(arg(l, 0), arg(l, 1), id, offset, data);
            check(l, res);
            if (res.ok) {
                Bytes& full = contents_[id];
                if (offset + data.size() > full.size()) fail(l, "write oracle out of bounds");
                std::copy(data.begin(), data.end(), full.begin() + long(offset));
            }
        } else if (c == "advance") {
            world(l).advance_clock(std::stoull(arg(l, 0)));
        } else if (c == "tamper") {
            if (arg(l, 0) == "clear") {
                world(l).clear_tamper();
            } else {
                world(l).set_tamper(arg(l, 0), make_tamper(l, opt(l, "mode", "flip")));
            }
        } else if (c == "steal") {
            const std::string& kind = arg(l, 0);
            const std::string& from = arg(l, 1);
            std::string as = opt(l, "as", from);
            if (kind == "session")
                sessions_.emplace(as, world(l).steal_session(from));
            else if (kind == "descriptor")
                descriptors_.emplace(as, world(l).steal_node_descriptor(from));
            else if (kind == "key")
                keys_.emplace(as, world(l).steal_node_key(from));
            else if (kind == "creds")
                creds_.emplace(as, world(l).steal_consumer_creds(from));
            else
                fail(l, "unknown steal kind " + kind);
        } else if (c == "snapshot") {
            snapshots_[opt(l, "as", arg(l, 0))] = world(l).snapshot(arg(l, 0));
        } else if (c == "forge-put") {
            auto it = sessions_.find(arg(l, 0));
            if (it == sessions_.end()) fail(l, "unknown stolen session " + arg(l, 0));
            check(l, world(l).forge_put(it->second, arg(l, 1), opt(l, "id"), opt(l, "policy"),
                                      payload(l)));
        } else if (c == "forge-token") {
            auto it = descriptors_.find(arg(l, 0));
            if (it == descriptors_.end()) fail(l, "unknown stolen descriptor " + arg(l, 0));
            check(l, world(l).forged_token_get(it->second, arg(l, 1), arg(l, 2), opt(l, "id")));
        } else if (c == "recover") {
            world(l).recover_node(arg(l, 0));
        } else if (c == "revoke") {
            world(l).revoke_validity(arg(l, 0));
        } else if (c == "reissue") {
            world(l).reissue(arg(l, 0));
        } else if (c == "remove") {
            world(l).remove_consumer(arg(l, 0));
        } else if (c == "expect-transcript") {
            if (opt(l, "mst") == "hidden" && world(l).adversary_sees_mst())
                fail(l, "a master session token is visible on the wire");
            if (opt(l, "secret") == "absent" &&
                world(l).contains_secret(world(l).transcript().flatten()))
                fail(l, "stored plaintext is visible on the wire");
        } else if (c == "expect-secret") {
            auto it = snapshots_.find(arg(l, 0));
            if (it == snapshots_.end()) fail(l, "unknown snapshot " + arg(l, 0));
            bool found = world(l).contains_secret(it->second);
            const std::string& want = arg(l, 1);
            if (want == "absent" && found) fail(l, "snapshot contains stored plaintext");
            if (want == "present" && !found) fail(l, "snapshot lacks the expected plaintext");
        } else if (c == "classify") {
            CompromiseReport r;
            r.asset = opt(l, "asset");
            r.occurred = opt(l, "occurred", "yes") == "yes";
            r.local = opt(l, "local") == "yes";
            r.forward = opt(l, "forward") == "yes";
            r.online_recoverable = opt(l, "recoverable") == "yes";
            for (const std::string& a : l.args) r.recovery_steps.push_back(a);
            reports_.push_back(std::move(r));
        } else {
            fail(l, "unknown command");
        }
    }

    uint64_t seed_ = 1;
    std::unique_ptr<SimNet> net_;
    std::map<std::string, client::SessionState> sessions_;
    std::map<std::string, nodes::NodeDescriptor> descriptors_;
    std::map<std::string, abe::AbePrivateKey> keys_;
    std::map<std::string, client::ConsumerCredentials> creds_;
    std::map<std::string, Bytes> snapshots_;
    std::map<std::string, Bytes> contents_;
    std::vector<CompromiseReport> reports_;
    ScenarioResult result_;
};

}  // namespace

ScenarioResult run_scenario(const std::string& script) {
    Runner r;
    return r.run(script);
}

ScenarioResult run_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProtocolError(ErrorCode::Malformed, "cannot open scenario " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return run_scenario(buf.str());
}

}  // namespace abestore::harness

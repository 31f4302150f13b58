// Command-line surface over the library: one command per process, with all
// shared state (registry log, authority state, credentials, stores) living
// under a state directory.  No protocol logic here -- every subcommand is a
// thin adapter onto the library calls.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "abestore/client.hpp"
#include "abestore/harness/harness.hpp"
#include "abestore/net/transport_tcp.hpp"
#include "abestore/nodes/authority.hpp"
#include "abestore/nodes/authz.hpp"
#include "abestore/nodes/service.hpp"

namespace fs = std::filesystem;
using namespace abestore;

namespace {

// Exit codes: 0 success, 2 usage, 3 state/config problems,
// 10 + ErrorCode for protocol error classes (documented in docs/cli.md).
constexpr int kExitUsage = 2;
constexpr int kExitState = 3;
int exit_code(ErrorCode c) { return 10 + int(c); }

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Paths {
    fs::path root;

    fs::path registry_log() const { return root / "registry.log"; }
    fs::path authority() const { return root / "authority.bin"; }
    fs::path engine_id() const { return root / "engine"; }
    fs::path node(const std::string& id) const { return root / "nodes" / (id + ".desc"); }
    fs::path creds(const std::string& name) const { return root / "creds" / (name + ".cred"); }
    fs::path session(const std::string& name) const {
        return root / "sessions" / (name + ".sess");
    }
    fs::path store(const std::string& id) const { return root / "store" / id; }
};

Bytes read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw StateError("cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string s = buf.str();
    return Bytes(s.begin(), s.end());
}

void write_file(const fs::path& p, std::span<const uint8_t> data, bool restrict_perms) {
    if (!p.parent_path().empty()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw StateError("cannot write " + p.string());
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    out.close();
    if (restrict_perms)
        fs::permissions(p, fs::perms::owner_read | fs::perms::owner_write,
                        fs::perm_options::replace);
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

const abe::AbeEngine& engine_for_state(const Paths& paths) {
    return abe::engine_for(to_string(read_file(paths.engine_id())));
}

// Session files hold the recovered token plus K_1, so they are as
// sensitive as the credential files.
Bytes session_bytes(const client::SessionState& st) {
    ByteWriter w;
    w.u8(1);
    w.blob(st.token.serialize());
    w.blob(st.k1);
    w.u64(st.expiry);
    w.u32(uint32_t(st.authorized.size()));
    for (const std::string& a : st.authorized) w.str(a);
    return w.take();
}

client::SessionState session_from_bytes(std::span<const uint8_t> data) {
    ByteReader r(data);
    if (r.u8() != 1) throw DecodeError("bad session file version");
    client::SessionState st;
    st.token = mst::MasterSessionToken::deserialize(r.blob());
    st.k1 = r.blob();
    st.expiry = r.u64();
    uint32_t n = r.u32();
    for (uint32_t i = 0; i < n; ++i) st.authorized.push_back(r.str());
    r.expect_done();
    return st;
}

std::pair<std::string, uint16_t> parse_address(const std::string& addr) {
    size_t colon = addr.rfind(':');
    if (colon == std::string::npos)
        throw UsageError("node address must be host:port, got '" + addr + "'");
    return {addr.substr(0, colon), uint16_t(std::stoul(addr.substr(colon + 1)))};
}

std::unique_ptr<net::Transport> connect_node(const nodes::Registry& reg,
                                             const std::string& node_id) {
    std::optional<nodes::NodeEntry> entry = reg.find_node(node_id);
    if (!entry) throw StateError("unknown node id " + node_id + " (see admin list-index)");
    auto [host, port] = parse_address(entry->address);
    return net::tcp_connect(host, port);
}

struct AuthorityCtx {
    nodes::Registry reg;
    nodes::ScalingLedger ledger;
    SystemRandom rng;
    std::optional<nodes::Authority> authority;

    explicit AuthorityCtx(const Paths& paths) : reg(paths.registry_log()) {
        authority.emplace(nodes::Authority::load_state(
            engine_for_state(paths), read_file(paths.authority()), reg, ledger, rng));
    }
};

void save_authority(const Paths& paths, const nodes::Authority& a) {
    write_file(paths.authority(), a.serialize_state(), true);
}

// Key pushes in the one-command-per-process model: re-issued node keys are
// written back into the descriptor files; a running daemon picks them up
// on restart.
void attach_file_installers(const Paths& paths, nodes::Authority& a) {
    if (!fs::exists(paths.root / "nodes")) return;
    for (const auto& entry : fs::directory_iterator(paths.root / "nodes")) {
        if (entry.path().extension() != ".desc") continue;
        nodes::NodeDescriptor d = nodes::NodeDescriptor::deserialize(read_file(entry.path()));
        fs::path file = entry.path();
        a.attach_installer(d.id, [file](const abe::AbePrivateKey& key) {
            nodes::NodeDescriptor cur = nodes::NodeDescriptor::deserialize(read_file(file));
            cur.key = key;
            write_file(file, cur.serialize(), true);
        });
    }
}

void deliver_consumer_keys(const Paths& paths,
                           const std::map<std::string, abe::AbePrivateKey>& reissued) {
    for (const auto& [id, key] : reissued) {
        fs::path file = paths.creds(id);
        if (!fs::exists(file)) continue;
        client::ConsumerCredentials c = client::ConsumerCredentials::deserialize(read_file(file));
        c.key = key;
        write_file(file, c.serialize(), true);
        std::cout << "re-keyed consumer " << id << "\n";
    }
}

// ---------------------------------------------------------------------------

int cmd_init(const Paths& paths, const std::string& engine_name, uint32_t x, uint32_t u,
             uint64_t ttl_max, const std::string& attrs) {
    if (fs::exists(paths.authority()))
        throw StateError("state directory already initialized: " + paths.root.string());
    fs::create_directories(paths.root);
    write_file(paths.engine_id(), to_bytes(engine_name == "mock" ? "mock-table-v1"
                                           : engine_name == "pairing" ? "cpabe-bn254-v1"
                                                                      : engine_name),
               false);

    const abe::AbeEngine& engine = engine_for_state(paths);
    abe::AbeSystemConfig cfg;
    for (const std::string& a : split_list(attrs))
        cfg.universe.push_back({a, abe::AttributeRole::Generic, 0});

    nodes::Registry reg(paths.registry_log());
    nodes::ScalingLedger ledger;
    SystemRandom rng;
    nodes::Authority a = nodes::Authority::system_init(engine, cfg, {x, u, ttl_max}, reg,
                                                       ledger, rng);
    save_authority(paths, a);
    std::cout << "initialized " << paths.root.string() << " (scheme " << engine.scheme()
              << ", x=" << x << ", u=" << u << ", " << a.public_params().universe.size()
              << " attributes)\n";
    return 0;
}

int cmd_node_run(const Paths& paths, const std::string& role, const std::string& id,
                 uint16_t port) {
    const abe::AbeEngine& engine = engine_for_state(paths);
    if (role == "authority") {
        // The authority has no online protocol surface; administration
        // happens through the admin subcommands.
        AuthorityCtx ctx(paths);
        std::cout << "authority state ok; index version " << ctx.reg.version()
                  << ". Use the admin subcommands to operate it.\n";
        return 0;
    }
    if (id.empty()) throw UsageError("--id is required for authz/service roles");

    nodes::Registry reg(paths.registry_log());
    nodes::NodeDescriptor desc = nodes::NodeDescriptor::deserialize(read_file(paths.node(id)));
    Clock clk = system_clock();

    net::TcpListener listener(port);
    std::cout << "node " << id << " (" << role << ") listening on port " << listener.port()
              << "\n"
              << std::flush;

    std::optional<nodes::AuthorizationNode> an;
    std::optional<nodes::ServiceNode> sn;
    if (role == "authz") {
        AuthorityCtx probe(paths);  // only for protocol params u / ttl_max
        an.emplace(engine, reg, std::move(desc), probe.authority->params().u,
                   probe.authority->params().ttl_max, clk);
    } else if (role == "service") {
        sn.emplace(engine, reg, std::move(desc), clk, paths.store(id));
    } else {
        throw UsageError("unknown role " + role);
    }

    for (;;) {
        std::unique_ptr<net::Transport> conn;
        try {
            conn = listener.accept();
        } catch (const ProtocolError&) {
            return 0;  // listener closed
        }
        if (reg.is_blacklisted(id)) {
            std::cout << "node " << id << " has been blacklisted; shutting down\n";
            return 0;
        }
        // Pick up a re-issued key (revocation / recovery of a peer) that
        // the authority wrote into the descriptor file since last time.
        try {
            an ? an->install_key(
                     nodes::NodeDescriptor::deserialize(read_file(paths.node(id))).key)
               : sn->install_key(
                     nodes::NodeDescriptor::deserialize(read_file(paths.node(id))).key);
        } catch (const StateError&) {
            std::cout << "descriptor for " << id << " is gone; shutting down\n";
            return 0;
        }
        // Connections are accepted eagerly but served one at a time: the
        // resource store is a single-writer structure.
        static std::mutex serve_mu;
        std::thread([&an, &sn, c = std::move(conn)]() mutable {
            std::lock_guard lk(serve_mu);
            SystemRandom rng;
            if (an)
                an->serve(*c, rng);
            else
                sn->serve(*c, rng);
            c->close();
        }).detach();
    }
}

int cmd_provision(const Paths& paths, const std::string& role, const std::string& attrs,
                  const std::string& address) {
    AuthorityCtx ctx(paths);
    nodes::NodeDescriptor d;
    if (role == "authz") {
        if (attrs.empty()) throw UsageError("--attrs is required for an authorization node");
        d = ctx.authority->provision_authorization_node(split_list(attrs), address);
    } else if (role == "service") {
        d = ctx.authority->provision_service_node(address);
    } else {
        throw UsageError("--role must be authz or service");
    }
    write_file(paths.node(d.id), d.serialize(), true);
    save_authority(paths, *ctx.authority);
    std::cout << d.id << "\n";
    return 0;
}

int cmd_revoke_validity(const Paths& paths, const std::string& attr) {
    AuthorityCtx ctx(paths);
    attach_file_installers(paths, *ctx.authority);
    std::map<std::string, abe::AbePrivateKey> reissued =
        ctx.authority->revoke_validity_attribute(attr);
    save_authority(paths, *ctx.authority);
    deliver_consumer_keys(paths, reissued);
    std::cout << "revoked " << attr << "; " << reissued.size() << " holder(s) re-keyed\n";
    return 0;
}

int cmd_recover_node(const Paths& paths, const std::string& id) {
    AuthorityCtx ctx(paths);
    std::optional<nodes::NodeEntry> entry = ctx.reg.find_node(id);
    if (!entry) throw StateError("unknown node id " + id);
    attach_file_installers(paths, *ctx.authority);

    nodes::NodeDescriptor fresh = entry->role == nodes::NodeRole::Authorization
                                      ? ctx.authority->recover_authorization_node(id)
                                      : ctx.authority->recover_service_node(id);
    fs::remove(paths.node(id));
    write_file(paths.node(fresh.id), fresh.serialize(), true);
    save_authority(paths, *ctx.authority);
    std::cout << "recovered " << id << " -> replacement " << fresh.id << "\n";
    return 0;
}

int cmd_list_index(const Paths& paths) {
    nodes::Registry reg(paths.registry_log());
    std::cout << "index version " << reg.version() << "\n";
    for (const auto& [id, e] : reg.whitelist()) {
        std::cout << id << "\t" << nodes::node_role_name(e.role) << "\t"
                  << (e.address.empty() ? "-" : e.address);
        if (!e.authorized.empty()) {
            std::cout << "\t";
            for (size_t i = 0; i < e.authorized.size(); ++i)
                std::cout << (i ? "," : "") << e.authorized[i];
        }
        std::cout << "\n";
    }
    return 0;
}

int cmd_enroll(const Paths& paths, const std::string& name, const std::string& attrs,
               const std::string& validity) {
    AuthorityCtx ctx(paths);
    client::ConsumerCredentials creds =
        ctx.authority->enroll_consumer(split_list(attrs), split_list(validity), name);
    write_file(paths.creds(name), creds.serialize(), true);
    save_authority(paths, *ctx.authority);
    std::cout << "enrolled " << name << "\n";
    return 0;
}

struct ConsumerCtx {
    nodes::Registry reg;
    SystemRandom rng;
    client::ConsumerCredentials creds;
    std::optional<client::Consumer> consumer;

    ConsumerCtx(const Paths& paths, const abe::AbeEngine& engine, const std::string& name)
        : reg(paths.registry_log()),
          creds(client::ConsumerCredentials::deserialize(read_file(paths.creds(name)))) {
        consumer.emplace(engine, reg, creds, rng);
    }
};

int cmd_auth(const Paths& paths, const std::string& name, const std::string& node_id,
             std::string attrs, std::string validity, uint64_t ttl) {
    const abe::AbeEngine& engine = engine_for_state(paths);
    ConsumerCtx ctx(paths, engine, name);

    std::vector<std::string> attr_list = split_list(attrs);
    if (attr_list.empty())
        for (const abe::AttributeId& a : ctx.creds.key.attrs)
            if (a.role == abe::AttributeRole::Generic) attr_list.push_back(a.name);
    std::vector<std::string> validity_list =
        validity.empty() ? ctx.creds.validity : split_list(validity);

    std::unique_ptr<net::Transport> conn = connect_node(ctx.reg, node_id);
    net::SecureSession s = net::SecureSession::establish(
        *conn, net::SecureSession::Role::Initiator, ctx.rng);
    client::SessionState st = ctx.consumer->authenticate(s, attr_list, validity_list, ttl);
    conn->close();

    write_file(paths.session(name), session_bytes(st), true);
    std::cout << "authenticated; token expires at " << st.expiry << "\n";
    return 0;
}

client::SessionState load_session(const Paths& paths, const std::string& name) {
    if (!fs::exists(paths.session(name)))
        throw UsageError("no session for " + name + "; run consumer auth first");
    return session_from_bytes(read_file(paths.session(name)));
}

int cmd_put(const Paths& paths, const std::string& name, const std::string& node_id,
            const std::string& id, const std::string& policy, const std::string& file) {
    const abe::AbeEngine& engine = engine_for_state(paths);
    ConsumerCtx ctx(paths, engine, name);
    client::SessionState st = load_session(paths, name);
    Bytes data = read_file(file);

    std::unique_ptr<net::Transport> conn = connect_node(ctx.reg, node_id);
    net::SecureSession s = net::SecureSession::establish(
        *conn, net::SecureSession::Role::Initiator, ctx.rng);
    ctx.consumer->put(s, st, id, policy, data);
    conn->close();
    std::cout << "stored " << id << " (" << data.size() << " bytes)\n";
    return 0;
}

int cmd_get(const Paths& paths, const std::string& name, const std::string& node_id,
            const std::string& id, const std::string& out, int64_t offset, int64_t length) {
    const abe::AbeEngine& engine = engine_for_state(paths);
    ConsumerCtx ctx(paths, engine, name);
    client::SessionState st = load_session(paths, name);

    std::optional<client::ByteRange> range;
    if (offset >= 0 || length >= 0) {
        if (offset < 0 || length < 0)
            throw UsageError("--offset and --length must be given together");
        range = client::ByteRange{uint64_t(offset), uint64_t(length)};
    }

    std::unique_ptr<net::Transport> conn = connect_node(ctx.reg, node_id);
    net::SecureSession s = net::SecureSession::establish(
        *conn, net::SecureSession::Role::Initiator, ctx.rng);
    Bytes data = ctx.consumer->get(s, st, id, range);
    conn->close();

    if (out.empty() || out == "-") {
        std::cout.write(reinterpret_cast<const char*>(data.data()),
                        std::streamsize(data.size()));
    } else {
        write_file(out, data, false);
        std::cerr << "wrote " << data.size() << " bytes to " << out << "\n";
    }
    return 0;
}

int cmd_write(const Paths& paths, const std::string& name, const std::string& node_id,
              const std::string& id, uint64_t offset, const std::string& file) {
    const abe::AbeEngine& engine = engine_for_state(paths);
    ConsumerCtx ctx(paths, engine, name);
    client::SessionState st = load_session(paths, name);
    Bytes data = read_file(file);

    std::unique_ptr<net::Transport> conn = connect_node(ctx.reg, node_id);
    net::SecureSession s = net::SecureSession::establish(
        *conn, net::SecureSession::Role::Initiator, ctx.rng);
    ctx.consumer->write(s, st, id, offset, data);
    conn->close();
    std::cout << "wrote " << data.size() << " bytes at offset " << offset << "\n";
    return 0;
}

int cmd_sim_run(const std::string& scenario, bool dump) {
    harness::ScenarioResult res = harness::run_scenario_file(scenario);
    for (const std::string& line : res.log) std::cout << line << "\n";
    for (const harness::CompromiseReport& r : res.reports) {
        std::cout << "compromise: " << r.asset << " occurred=" << (r.occurred ? "yes" : "no")
                  << " local=" << (r.local ? "yes" : "no")
                  << " forward=" << (r.forward ? "yes" : "no")
                  << " recoverable=" << (r.online_recoverable ? "yes" : "no") << "\n";
        for (const std::string& s : r.recovery_steps) std::cout << "  step: " << s << "\n";
    }
    std::cout << "transcript: " << res.transcript.entries.size() << " chunks, "
              << res.transcript.flatten().size() << " bytes\n";
    if (dump) std::cout << res.transcript.dump();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attribute-based distributed storage tool"};
    app.require_subcommand(1);

    std::string state = "abestore-state";
    if (const char* env = std::getenv("ABESTORE_STATE")) state = env;
    app.add_option("--state", state, "state directory (env ABESTORE_STATE)")
        ->envname("ABESTORE_STATE");

    // init
    std::string engine_name = "pairing", attrs, validity, role, node_id, id, policy, file,
                out, name, scenario, address;
    uint32_t x = 4, u = 2;
    uint64_t ttl_max = 900, ttl = 600, woffset = 0;
    uint16_t port = 0;
    int64_t offset = -1, length = -1;
    bool dump = false;

    CLI::App* c_init = app.add_subcommand("init", "create a new system");
    c_init->add_option("--engine", engine_name, "mock or pairing");
    c_init->add_option("--x", x, "validity attribute count");
    c_init->add_option("--u", u, "minimum validity attributes per consumer");
    c_init->add_option("--ttl-max", ttl_max, "maximum token TTL, seconds");
    c_init->add_option("--attrs", attrs, "comma-separated generic attributes")->required();

    CLI::App* c_node = app.add_subcommand("node", "node daemons");
    CLI::App* c_node_run = c_node->add_subcommand("run", "run a node");
    c_node_run->add_option("--role", role, "authority, authz or service")->required();
    c_node_run->add_option("--id", node_id, "node id from admin provision");
    c_node_run->add_option("--port", port, "listen port (0 = ephemeral)");

    CLI::App* c_admin = app.add_subcommand("admin", "authority administration");
    CLI::App* c_prov = c_admin->add_subcommand("provision", "provision a node");
    c_prov->add_option("--role", role, "authz or service")->required();
    c_prov->add_option("--attrs", attrs, "responsibility set (authz role)");
    c_prov->add_option("--address", address, "host:port the node will listen on")->required();
    CLI::App* c_revoke = c_admin->add_subcommand("revoke-validity", "revoke a validity attribute");
    c_revoke->add_option("attr", attrs, "validity attribute name")->required();
    CLI::App* c_recover = c_admin->add_subcommand("recover-node", "recover a compromised node");
    c_recover->add_option("id", node_id, "node id")->required();
    c_admin->add_subcommand("list-index", "print the public index");

    CLI::App* c_consumer = app.add_subcommand("consumer", "consumer routines");
    CLI::App* c_enroll = c_consumer->add_subcommand("enroll", "enroll a consumer");
    c_enroll->add_option("--name", name)->required();
    c_enroll->add_option("--attrs", attrs, "comma-separated generic attributes")->required();
    c_enroll->add_option("--validity", validity, "comma-separated validity attributes")
        ->required();
    CLI::App* c_auth = c_consumer->add_subcommand("auth", "attribute-authenticate");
    c_auth->add_option("--name", name)->required();
    c_auth->add_option("--node", node_id, "authorization node id")->required();
    c_auth->add_option("--attrs", attrs, "attributes to advertise (default: all held)");
    c_auth->add_option("--validity", validity, "validity attributes (default: all held)");
    c_auth->add_option("--ttl", ttl, "requested TTL, seconds");
    CLI::App* c_put = c_consumer->add_subcommand("put", "store a resource");
    c_put->add_option("--name", name)->required();
    c_put->add_option("--node", node_id, "service node id")->required();
    c_put->add_option("--id", id)->required();
    c_put->add_option("--policy", policy, "access policy text")->required();
    c_put->add_option("--file", file)->required();
    CLI::App* c_get = c_consumer->add_subcommand("get", "fetch a resource");
    c_get->add_option("--name", name)->required();
    c_get->add_option("--node", node_id)->required();
    c_get->add_option("--id", id)->required();
    c_get->add_option("--out", out, "output file (default stdout)");
    c_get->add_option("--offset", offset, "range offset");
    c_get->add_option("--length", length, "range length");
    CLI::App* c_write = c_consumer->add_subcommand("write", "overwrite a byte range");
    c_write->add_option("--name", name)->required();
    c_write->add_option("--node", node_id)->required();
    c_write->add_option("--id", id)->required();
    c_write->add_option("--offset", woffset)->required();
    c_write->add_option("--file", file)->required();

    CLI::App* c_sim = app.add_subcommand("sim", "simulation harness");
    CLI::App* c_sim_run = c_sim->add_subcommand("run", "execute a scenario script");
    c_sim_run->add_option("scenario", scenario, "scenario file")->required();
    c_sim_run->add_flag("--dump-transcript", dump, "print the per-chunk transcript");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    Paths paths{fs::path(state)};
    try {
        if (*c_init) return cmd_init(paths, engine_name, x, u, ttl_max, attrs);
        if (*c_node_run) return cmd_node_run(paths, role, node_id, port);
        if (*c_prov) return cmd_provision(paths, role, attrs, address);
        if (*c_revoke) return cmd_revoke_validity(paths, attrs);
        if (*c_recover) return cmd_recover_node(paths, node_id);
        if (c_admin->get_subcommand("list-index")->parsed()) return cmd_list_index(paths);
        if (*c_enroll) return cmd_enroll(paths, name, attrs, validity);
        if (*c_auth) return cmd_auth(paths, name, node_id, attrs, validity, ttl);
        if (*c_put) return cmd_put(paths, name, node_id, id, policy, file);
        if (*c_get) return cmd_get(paths, name, node_id, id, out, offset, length);
        if (*c_write) return cmd_write(paths, name, node_id, id, woffset, file);
        if (*c_sim_run) return cmd_sim_run(scenario, dump);
        std::cerr << "error: no subcommand\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const StateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitState;
    } catch (const DecodeError& e) {
        std::cerr << "error: Malformed: " << e.what() << "\n";
        return exit_code(ErrorCode::Malformed);
    } catch (const ProtocolError& e) {
        std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
        return exit_code(e.code());
    }
}

#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "abestore/client.hpp"
#include "abestore/nodes/authority.hpp"
#include "abestore/nodes/authz.hpp"
#include "abestore/nodes/ledger.hpp"
#include "abestore/nodes/service.hpp"

namespace abestore::harness {

// ---------------------------------------------------------------------------
// Transcript: every chunk on every simulated link, in order.

struct TranscriptEntry {
    std::string link;  // "consumer->node#session"
    int dir = 0;       // 0 = consumer-to-node, 1 = node-to-consumer
    Bytes data;
};

struct Transcript {
    std::vector<TranscriptEntry> entries;

    // All observed bytes, concatenated (for scans and byte-identity).
    Bytes flatten() const;
    // One line per entry: link, direction, length, SHA-256.
    std::string dump() const;
};

// ---------------------------------------------------------------------------
// Adversary model and compromise classification.

enum class Capability : uint8_t { Eavesdrop, Tamper, Replay, HoldKeys, ControlNode };

struct AdversaryModel {
    std::set<Capability> capabilities;
    bool strong() const {
        return capabilities.count(Capability::HoldKeys) ||
               capabilities.count(Capability::ControlNode);
    }
};

struct CompromiseReport {
    std::string asset;
    bool occurred = false;
    bool local = false;
    bool forward = false;
    bool online_recoverable = false;
    std::vector<std::string> recovery_steps;
};

// ---------------------------------------------------------------------------
// The simulated world.

class SimNet {
public:
    explicit SimNet(uint64_t seed);

    // World building -------------------------------------------------------
    void init(const std::string& engine_name, uint32_t x, uint32_t u, uint64_t ttl_max,
              const std::vector<std::string>& generics);
    // Returns the registry node id; `alias` is the scenario-facing name.
    std::string add_authz(const std::string& alias, const std::vector<std::string>& attrs);
    std::string add_service(const std::string& alias);
    void enroll(const std::string& name, const std::vector<std::string>& attrs,
                const std::vector<std::string>& validity);

    uint64_t now() const { return *now_; }
    void advance_clock(uint64_t dt) { *now_ += dt; }

    // Routines -------------------------------------------------------------
    // Each call runs one complete session on a fresh link.  Failures are
    // captured, not thrown.
    struct OpResult {
        bool ok = false;
        ErrorCode code = ErrorCode::None;
        std::string message;
        Bytes data;
    };
    OpResult authenticate(const std::string& consumer, const std::string& authz_alias,
                          const std::vector<std::string>& attrs,
                          const std::vector<std::string>& validity, uint64_t ttl);
    OpResult put(const std::string& consumer, const std::string& service_alias,
                 const std::string& id, const std::string& policy, const Bytes& data);
    OpResult get(const std::string& consumer, const std::string& service_alias,
                 const std::string& id, std::optional<client::ByteRange> range = {});
    OpResult write(const std::string& consumer, const std::string& service_alias,
                   const std::string& id, uint64_t offset, const Bytes& data);

    // Adversary ------------------------------------------------------------
    // Tamper function applied to every chunk the consumer sends toward the
    // named node (nullopt drops the chunk).  Pass alias "*" for all links.
    void set_tamper(const std::string& alias, net::TamperHook hook);
    void clear_tamper();

    // Strong model: exfiltrate node state / session material.
    Bytes snapshot(const std::string& alias);
    abe::AbePrivateKey steal_node_key(const std::string& alias);
    nodes::NodeDescriptor steal_node_descriptor(const std::string& alias);
    client::SessionState steal_session(const std::string& consumer);
    client::ConsumerCredentials steal_consumer_creds(const std::string& consumer);

    // A stolen-MST Put attempt signed by the adversary's own key instead
    // of the session's PK_self.
    OpResult forge_put(const client::SessionState& stolen, const std::string& service_alias,
                       const std::string& id, const std::string& policy, const Bytes& data);
    // A Get using a forged token minted by a stolen/blacklisted issuer key.
    OpResult forged_token_get(const nodes::NodeDescriptor& stolen_issuer,
                              const std::string& consumer, const std::string& service_alias,
                              const std::string& id);

    // Recovery -------------------------------------------------------------
    void recover_node(const std::string& alias);
    std::map<std::string, abe::AbePrivateKey> revoke_validity(const std::string& attr);
    void remove_consumer(const std::string& name);
    void reissue(const std::string& consumer);

    // Introspection --------------------------------------------------------
    const Transcript& transcript() const { return transcript_; }
    nodes::ScalingLedger& ledger() { return ledger_; }
    nodes::Registry& registry() { return reg_; }
    nodes::Authority& authority() { return *authority_; }
    const abe::AbeEngine& engine() const { return *engine_; }
    // Plaintexts pushed via put/write, for compromise scans.
    const std::vector<Bytes>& secrets() const { return secrets_; }
    // Serialized MSTs recovered by consumers, for compromise scans.
    const std::vector<Bytes>& issued_tokens() const { return issued_tokens_; }

    // Goal predicates ------------------------------------------------------
    // True iff any issued MST's bytes appear in the observed transcript.
    bool adversary_sees_mst() const;
    // True iff any 16-byte window of any secret appears in the given haystack.
    bool contains_secret(const Bytes& haystack) const;

private:
    struct ConsumerState {
        client::ConsumerCredentials creds;
        std::unique_ptr<Drbg> rng;
        std::unique_ptr<client::Consumer> client;
        std::optional<client::SessionState> session;
    };
    struct NodeState {
        std::string id;  // registry node id (changes on recovery)
        std::unique_ptr<Drbg> rng;
        std::unique_ptr<nodes::AuthorizationNode> authz;
        std::unique_ptr<nodes::ServiceNode> service;
    };

    NodeState& node(const std::string& alias);
    ConsumerState& consumer(const std::string& name);
    void deliver_keys(const std::map<std::string, abe::AbePrivateKey>& reissued);
    template <class Fn>
    OpResult run_session(const std::string& consumer, const std::string& alias, Fn&& fn);

    Drbg root_;
    std::unique_ptr<Drbg> auth_rng_;
    std::shared_ptr<uint64_t> now_;
    Clock clk_;
    mutable std::mutex tmu_;
    nodes::Registry reg_;
    nodes::ScalingLedger ledger_;
    const abe::AbeEngine* engine_ = nullptr;
    std::optional<nodes::Authority> authority_;
    std::map<std::string, NodeState> nodes_;
    std::map<std::string, ConsumerState> consumers_;
    std::map<std::string, net::TamperHook> tamper_;
    Transcript transcript_;
    std::vector<Bytes> secrets_;
    std::vector<Bytes> issued_tokens_;
    uint64_t session_counter_ = 0;
};

// ---------------------------------------------------------------------------
// Collusion: attempts every API-expressible mix of the given keys against
// the ciphertext -- each key alone plus every cross-key component splice.
// Returns true iff any attempt decrypts.
bool collude(const abe::AbeEngine& engine, const abe::AbePublicParams& pk,
             const std::vector<abe::AbePrivateKey>& keys, const abe::AbeCiphertext& target);

// ---------------------------------------------------------------------------
// Scaling-effort measurement.

struct ScalingPoint {
    size_t size = 0;
    uint64_t messages = 0;
    uint64_t keying_ops = 0;
};

// Actions: add-authority, add-authz-node, add-service-node, add-consumer,
// remove-consumer-holders (sweep = consumers sharing the revoked attr),
// remove-consumer-authz (sweep = authorization node count).
std::vector<ScalingPoint> measure_scaling(const std::string& action,
                                          const std::vector<size_t>& sweep);

// Ratio test: counter(size)/bound(size) stays within `tol` of constant
// across the sweep.
bool fits_class(const std::vector<ScalingPoint>& points,
                const std::function<double(size_t)>& bound, bool use_messages = true,
                double tol = 1.5);

// ---------------------------------------------------------------------------
// Scenario scripts.

struct ScenarioResult {
    Transcript transcript;
    std::vector<CompromiseReport> reports;
    std::vector<std::string> log;  // one line per executed command
};

// Executes a scenario script (see scenarios/ for the format).  Throws
// ProtocolError(Malformed) on parse errors or unknown names; assertion
// failures (expect=...) throw ProtocolError(Internal) naming the line.
ScenarioResult run_scenario(const std::string& script);
ScenarioResult run_scenario_file(const std::string& path);

}  // namespace abestore::harness

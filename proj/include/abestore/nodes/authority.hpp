#pragma once

#include <functional>

#include "abestore/abe/engine.hpp"
#include "abestore/client.hpp"
#include "abestore/nodes/descriptor.hpp"
#include "abestore/nodes/ledger.hpp"

namespace abestore::nodes {

struct ProtocolParams {
    uint32_t x = 4;         // total validity attributes
    uint32_t u = 2;         // minimum a consumer must advertise
    uint64_t ttl_max = 900;  // seconds
};

// The trusted authority: sole holder of the ABE master key, source of
// every issued key, and driver of the recovery procedures.  Key delivery
// to live nodes goes through installer callbacks the host environment
// registers (the "generic secure key distribution mechanism").
class Authority {
public:
    using KeyInstaller = std::function<void(const abe::AbePrivateKey&)>;

    // Builds the universe (SN, v_1..v_x, plus the generic attributes in
    // cfg), runs ABE setup, and publishes the public params.
    static Authority system_init(const abe::AbeEngine& engine, const abe::AbeSystemConfig& cfg,
                                 const ProtocolParams& params, Registry& registry,
                                 ScalingLedger& ledger, RandomSource& rng);

    // The authority's own state file: public params, master key, protocol
    // parameters, and the enrollment roster.  Never travels on the wire.
    Bytes serialize_state() const;
    static Authority load_state(const abe::AbeEngine& engine, std::span<const uint8_t> data,
                                Registry& registry, ScalingLedger& ledger, RandomSource& rng);

    const ProtocolParams& params() const { return params_; }
    const abe::AbePublicParams& public_params() const { return pk_; }
    std::vector<std::string> validity_attrs() const;

    // Host environment hook: how to push a re-issued key to a live node.
    void attach_installer(const std::string& node_id, KeyInstaller installer);

    NodeDescriptor provision_service_node(const std::string& address = "");
    NodeDescriptor provision_authorization_node(const std::vector<std::string>& a_j,
                                                const std::string& address = "");

    struct EnrolledConsumer {
        std::string id;
        std::vector<std::string> attrs;
        std::vector<std::string> validity;
    };

    client::ConsumerCredentials enroll_consumer(const std::vector<std::string>& attrs,
                                                const std::vector<std::string>& validity,
                                                const std::string& id = "");
    // Fresh key for the same attribute names at current epochs.
    client::ConsumerCredentials reissue_consumer(const client::ConsumerCredentials& old);

    const std::vector<EnrolledConsumer>& consumers() const { return consumers_; }

    // Rotates the attribute and re-issues keys for every enrolled holder
    // except the excluded ones; the returned keys are the re-issues, keyed
    // by consumer id.
    std::map<std::string, abe::AbePrivateKey> revoke_validity_attribute(
        const std::string& name, const std::set<std::string>& exclude = {});

    // Removing a consumer = revoking one validity attribute it requires
    // and re-keying the remaining holders.
    std::map<std::string, abe::AbePrivateKey> remove_consumer(const std::string& id);

    NodeDescriptor recover_service_node(const std::string& id);
    NodeDescriptor recover_authorization_node(const std::string& id);

private:
    Authority(const abe::AbeEngine& engine, const ProtocolParams& params, Registry& registry,
              ScalingLedger& ledger, RandomSource& rng);

    abe::AbePrivateKey service_key();
    NodeDescriptor provision_service_node_locked(const std::string& id,
                                                 const std::string& address);
    void rekey_service_nodes();
    std::vector<abe::AttributeId> current_ids(const std::vector<std::string>& names);

    const abe::AbeEngine* engine_;
    abe::AbePublicParams pk_;
    abe::AbeMasterKey mk_;
    ProtocolParams params_;
    Registry* registry_;
    ScalingLedger* ledger_;
    RandomSource* rng_;
    uint64_t next_id_ = 1;
    std::map<std::string, KeyInstaller> installers_;
    std::vector<EnrolledConsumer> consumers_;
};

}  // namespace abestore::nodes

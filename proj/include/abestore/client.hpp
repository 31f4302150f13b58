#pragma once

#include <optional>

#include "abestore/abe/chain.hpp"
#include "abestore/clock.hpp"
#include "abestore/mst.hpp"
#include "abestore/net/secure_session.hpp"
#include "abestore/nodes/registry.hpp"

namespace abestore::client {

struct ConsumerCredentials {
    abe::AbePrivateKey key;
    suite::SigKeyPair sig;  // PK_self / SK_self
    std::vector<std::string> validity;  // held validity attribute names

    Bytes serialize() const;
    static ConsumerCredentials deserialize(std::span<const uint8_t> data);
};

// The result of Attribute-Authenticate: the token to present and the
// session key shared with whoever can open the token.  Held in memory
// only.
struct SessionState {
    mst::MasterSessionToken token;
    Bytes k1;
    uint64_t expiry = 0;
    std::vector<std::string> authorized;  // A'

    policy::AttributeSet authorized_set() const {
        return policy::AttributeSet(authorized.begin(), authorized.end());
    }
};

struct ByteRange {
    uint64_t offset = 0;
    uint64_t length = 0;
};

// Consumer-side protocol driver.  Network I/O happens over caller-supplied
// secure sessions so the same code runs over in-memory links (harness) and
// TCP (CLI).
class Consumer {
public:
    Consumer(const abe::AbeEngine& engine, const nodes::Registry& index,
             ConsumerCredentials creds, RandomSource& rng);

    const ConsumerCredentials& creds() const { return creds_; }

    // Attribute-Authenticate against an authorization node.
    SessionState authenticate(net::SecureSession& s, const std::vector<std::string>& attrs,
                              const std::vector<std::string>& validity, uint64_t ttl_req);

    void put(net::SecureSession& s, SessionState& st, const std::string& id,
             const std::string& policy_text, std::span<const uint8_t> data);

    Bytes get(net::SecureSession& s, SessionState& st, const std::string& id,
              std::optional<ByteRange> range = std::nullopt);

    // Overwrites the bytes at [offset, offset+data.size()) in place.
    void write(net::SecureSession& s, SessionState& st, const std::string& id, uint64_t offset,
               std::span<const uint8_t> data);

    // Whole-resource replacement (the policy stays as stored).
    void replace(net::SecureSession& s, SessionState& st, const std::string& id,
                 std::span<const uint8_t> data);

private:
    struct FetchResult {
        uint32_t chunk_size = 0;
        uint64_t plaintext_len = 0;
        abe::AbeCiphertext kem_header;
        std::vector<Bytes> all_digests;
        uint64_t first_chunk = 0;
        std::vector<Bytes> chunks;
    };
    FetchResult fetch(net::SecureSession& s, SessionState& st, const std::string& id,
                      std::optional<ByteRange> range);

    const abe::AbeEngine* engine_;
    const nodes::Registry* index_;
    ConsumerCredentials creds_;
    RandomSource* rng_;
};

}  // namespace abestore::client

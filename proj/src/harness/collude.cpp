#include <map>

#include "abestore/harness/harness.hpp"

namespace abestore::harness {

namespace {

// A private key pulled apart into its per-attribute records so pieces of
// two keys can be spliced together through the public serialization
// format.  `head` is whatever precedes the attribute list (the key id for
// the mock scheme, the D element for the pairing scheme).
struct SplitKey {
    std::string scheme;
    Bytes head;
    std::map<abe::AttributeId, Bytes> records;
};

SplitKey split(const abe::AbePrivateKey& sk) {
    SplitKey out;
    out.scheme = sk.scheme;
    ByteReader r(sk.opaque);
    out.head = r.blob();
    uint32_t n = r.u32();
    if (sk.scheme == "mock-table-v1") {
        if (n != sk.attrs.size()) throw DecodeError("component count mismatch");
        for (uint32_t i = 0; i < n; ++i) out.records[sk.attrs[i]] = r.blob();
    } else {
        for (uint32_t i = 0; i < n; ++i) {
            abe::AttributeId id;
            id.name = r.str();
            id.epoch = r.u32();
            ByteWriter w;
            w.blob(r.blob());
            w.blob(r.blob());
            // Recover the role from the holder's attribute list.
            for (const abe::AttributeId& a : sk.attrs)
                if (a.name == id.name && a.epoch == id.epoch) id.role = a.role;
            out.records[id] = w.take();
        }
    }
    r.expect_done();
    return out;
}

abe::AbePrivateKey assemble(const SplitKey& k) {
    abe::AbePrivateKey sk;
    sk.scheme = k.scheme;
    ByteWriter w;
    w.blob(k.head);
    w.u32(uint32_t(k.records.size()));
    for (const auto& [id, rec] : k.records) {
        sk.attrs.push_back(id);
        if (k.scheme == "mock-table-v1") {
            w.blob(rec);
        } else {
            ByteReader r(rec);
            w.str(id.name);
            w.u32(id.epoch);
            w.blob(r.blob());
            w.blob(r.blob());
        }
    }
    sk.opaque = w.take();
    return sk;
}

bool decrypts(const abe::AbeEngine& engine, const abe::AbePublicParams& pk,
              const abe::AbeCiphertext& target, const abe::AbePrivateKey& sk) {
    try {
        engine.decrypt(pk, target, sk);
        return true;
    } catch (const AbeDecryptError&) {
        return false;
    }
}

}  // namespace

bool collude(const abe::AbeEngine& engine, const abe::AbePublicParams& pk,
             const std::vector<abe::AbePrivateKey>& keys, const abe::AbeCiphertext& target) {
    // Each key alone.
    for (const abe::AbePrivateKey& k : keys)
        if (decrypts(engine, pk, target, k)) return true;

    std::vector<SplitKey> parts;
    for (const abe::AbePrivateKey& k : keys) parts.push_back(split(k));

    for (size_t i = 0; i < parts.size(); ++i) {
        for (size_t j = 0; j < parts.size(); ++j) {
            if (i == j) continue;

            // Graft one donor record at a time onto the base key.
            for (const auto& [id, rec] : parts[j].records) {
                SplitKey merged = parts[i];
                merged.records[id] = rec;
                if (decrypts(engine, pk, target, assemble(merged))) return true;
            }

            // Full union: base records win on overlap.
            SplitKey merged = parts[i];
            merged.records.insert(parts[j].records.begin(), parts[j].records.end());
            if (decrypts(engine, pk, target, assemble(merged))) return true;
        }
    }
    return false;
}

}  // namespace abestore::harness

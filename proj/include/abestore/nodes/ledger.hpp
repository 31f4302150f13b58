#pragma once

#include <cstddef>
#include <cstdint>

namespace abestore::nodes {

// System census at a point in time; the symbols mirror the scaling
// analysis: authorities, authorization nodes, service nodes, consumers,
// plus the attribute universe and validity-attribute sizes.
//
// The cryptographic core is single-authority; `authorities` exists so the
// effort model can account for multi-authority deployments, where each
// keying batch costs one message per authority.
struct ScalingCensus {
    size_t authorities = 1;
    size_t authz_nodes = 0;
    size_t service_nodes = 0;
    size_t consumers = 0;
    size_t attrs = 0;
    size_t validity = 0;
};

// Effort meter for scaling actions.  Counters are reset before each
// measured action; the census tracks system size alongside.
struct ScalingLedger {
    uint64_t messages = 0;
    uint64_t keying_ops = 0;
    ScalingCensus census;

    void reset_counters() {
        messages = 0;
        keying_ops = 0;
    }
    void message(uint64_t n = 1) { messages += n; }
    void keying(uint64_t n = 1) { keying_ops += n; }
};

}  // namespace abestore::nodes

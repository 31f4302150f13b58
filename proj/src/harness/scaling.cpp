#include <cmath>

#include "abestore/harness/harness.hpp"

namespace abestore::harness {

std::vector<ScalingPoint> measure_scaling(const std::string& action,
                                          const std::vector<size_t>& sweep) {
    std::vector<ScalingPoint> out;

    for (size_t n : sweep) {
        ScalingPoint pt;
        pt.size = n;

        if (action == "add-authority") {
            // Accounting model only: the crypto core is single-authority.
            // Joining authority number n+1 synchronizes the universe with
            // each of the n existing authorities and publishes once.
            nodes::ScalingLedger ledger;
            ledger.census.authorities = n;
            ledger.reset_counters();
            ledger.message(ledger.census.authorities + 1);
            ledger.keying(1);
            ledger.census.authorities += 1;
            pt.messages = ledger.messages;
            pt.keying_ops = ledger.keying_ops;
        } else if (action == "add-authz-node" || action == "add-service-node" ||
                   action == "add-consumer") {
            SimNet net(7000 + n);
            net.init("mock", 4, 2, 900, {"a1", "a2"});
            net.ledger().census.authorities = n;
            net.ledger().reset_counters();
            if (action == "add-authz-node")
                net.add_authz("probe", {"a1"});
            else if (action == "add-service-node")
                net.add_service("probe");
            else
                net.enroll("probe", {"a1"}, {"v1", "v2"});
            pt.messages = net.ledger().messages;
            pt.keying_ops = net.ledger().keying_ops;
        } else if (action == "remove-consumer-holders") {
            // n = consumers sharing the revoked validity attribute.
            SimNet net(8000 + n);
            net.init("mock", 4, 2, 900, {"a1", "a2"});
            net.add_authz("an", {"a1", "a2"});
            net.add_service("sn");
            for (size_t i = 0; i < n; ++i)
                net.enroll("c" + std::to_string(i), {"a1"}, {"v1", "v2"});
            net.ledger().reset_counters();
            net.remove_consumer("c0");
            pt.messages = net.ledger().messages;
            pt.keying_ops = net.ledger().keying_ops;
        } else if (action == "remove-consumer-authz") {
            // n = authorization node count; holder set stays fixed.
            SimNet net(9000 + n);
            net.init("mock", 4, 2, 900, {"a1", "a2"});
            for (size_t i = 0; i < n; ++i) net.add_authz("an" + std::to_string(i), {"a1"});
            net.add_service("sn");
            net.enroll("c0", {"a1"}, {"v1", "v2"});
            net.enroll("c1", {"a1"}, {"v1", "v2"});
            net.ledger().reset_counters();
            net.remove_consumer("c0");
            pt.messages = net.ledger().messages;
            pt.keying_ops = net.ledger().keying_ops;
        } else {
            throw ProtocolError(ErrorCode::Malformed, "unknown scaling action " + action);
        }
        out.push_back(pt);
    }
    return out;
}

bool fits_class(const std::vector<ScalingPoint>& points,
                const std::function<double(size_t)>& bound, bool use_messages, double tol) {
    if (points.empty()) return false;
    double lo = 0, hi = 0;
    bool first = true;
    for (const ScalingPoint& p : points) {
        double b = bound(p.size);
        if (b <= 0) return false;
        double counter = double(use_messages ? p.messages : p.keying_ops);
        double ratio = counter / b;
        if (first) {
            lo = hi = ratio;
            first = false;
        } else {
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    if (lo == 0) return hi == 0;
    return hi / lo <= tol;
}

}  // namespace abestore::harness

#pragma once

#include <cstdint>
#include <functional>

namespace abestore {

// Seconds since an arbitrary epoch.  Nodes never read the wall clock
// directly; the harness substitutes a virtual clock it can advance.
using Clock = std::function<uint64_t()>;

Clock system_clock();

}  // namespace abestore

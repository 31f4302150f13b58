#include "abestore/clock.hpp"

#include <ctime>

namespace abestore {

Clock system_clock() {
    return [] { return uint64_t(std::time(nullptr)); };
}

}  // namespace abestore

#pragma once

#include <string>

#include "spherekit/lowrank.hpp"

namespace spherekit {

// Self-describing text container for a rank-K representation. Complex values
// are stored as [re, im] pairs; the round trip is value-exact. Throws
// io_error on filesystem or format problems.
void save_sfun(const LowRankSphereFun& f, const std::string& path);
LowRankSphereFun load_sfun(const std::string& path);

}  // namespace spherekit

#pragma once

#include <string>

namespace aoapos {

// Shortest-locale-independent "%.17g" rendering; round-trips every double.
std::string fmt17(double x);

}  // namespace aoapos

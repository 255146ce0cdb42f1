#pragma once

#include <cstdio>
#include <string>

namespace tslab {

// Fixed 9-significant-digit rendering used by every CSV writer.
inline std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace tslab

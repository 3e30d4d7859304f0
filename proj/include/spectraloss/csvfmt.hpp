#ifndef SPECTRALOSS_CSVFMT_HPP
#define SPECTRALOSS_CSVFMT_HPP

#include <cstdio>
#include <string>

namespace spectraloss {

/// Round-trip float formatting: 17 significant digits recover the exact
/// binary64 value on read-back.
inline std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace spectraloss

#endif

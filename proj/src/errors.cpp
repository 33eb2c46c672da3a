#include "memarith/errors.hpp"

#include <cstdio>

namespace memarith {

namespace {

std::string ohms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

RangeError::RangeError(const std::string& subexpression, double required_ohms,
                       double lo_ohms, double hi_ohms)
    : Error("subexpression '" + subexpression + "' needs " + ohms(required_ohms) +
            " ohms, outside the storable band [" + ohms(lo_ohms) + ", " +
            ohms(hi_ohms) + "]"),
      subexpression_(subexpression),
      required_ohms_(required_ohms) {}

TargetOutOfRangeError::TargetOutOfRangeError(double target_ohms, double lo_ohms,
                                             double hi_ohms)
    : Error("target " + ohms(target_ohms) + " ohms lies outside the programmable band [" +
            ohms(lo_ohms) + ", " + ohms(hi_ohms) + "]"),
      target_(target_ohms) {}

}  // namespace memarith

#include "gateminer/charprops.hpp"

#include <cmath>
#include <string>

namespace gateminer {

namespace {
constexpr double kHcEvNm = 1240.0;
}

BandGapResult optical_band_gap(double lambda_nm) {
  if (!(lambda_nm > 0.0) || !std::isfinite(lambda_nm)) {
    throw std::invalid_argument("wavelength must be a positive number of nanometres, got " + std::to_string(lambda_nm));
  }
  return BandGapResult{lambda_nm, kHcEvNm / lambda_nm};
}

}  // namespace gateminer

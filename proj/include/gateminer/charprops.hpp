#pragma once

#include <stdexcept>

namespace gateminer {

struct BandGapResult {
  double lambda_nm = 0.0;
  double e_g_ev = 0.0;
};

/// E_g [eV] = 1240 / lambda [nm], with 1240 taken as hc in eV*nm.
/// Throws std::invalid_argument for non-positive wavelengths.
BandGapResult optical_band_gap(double lambda_nm);

}  // namespace gateminer

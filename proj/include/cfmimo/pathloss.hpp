#pragma once

#include "cfmimo/types.hpp"

namespace cfmimo {

/// COST-231 Hata constant L in dB, built from carrier frequency (MHz inside)
/// and the AP/UE antenna heights:
///   L = 46.3 + 33.9 log10(f) - 13.82 log10(h_AP)
///       - (1.1 log10(f) - 0.7) h_UE + (1.56 log10(f) - 0.8)
double cost231_constant_db(const SystemConfig& cfg);

/// Three-slope path loss in dB (d in km):
///   d > d1        : -L - 35 log10(d)
///   d0 < d <= d1  : -L - 15 log10(d1) - 20 log10(d)
///   d <= d0       : -L - 15 log10(d1) - 20 log10(d0)
/// Continuous at both breakpoints; flat (clamped) inside d0.
double three_slope_path_loss_db(double d_km, const SystemConfig& cfg);

}  // namespace cfmimo

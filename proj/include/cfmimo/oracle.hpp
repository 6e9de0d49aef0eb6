#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cfmimo/estimation.hpp"
#include "cfmimo/moments.hpp"
#include "cfmimo/pilots.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// One synthetic scenario with O(1) magnitudes; exercises the moment algebra
/// without the link-budget scaling.
struct SyntheticCase {
    SystemConfig cfg;
    Deployment dep;
    PilotBook pb;
    EstimationStats es;
};

SyntheticCase make_synthetic_case(int M, int N, int K, int tau_p, PilotMode mode,
                                  std::uint64_t seed);

struct OracleTermResult {
    std::string term;
    double closed = 0.0;  ///< closed-form value
    double mc = 0.0;      ///< Monte-Carlo estimate
    double se = 0.0;      ///< standard error of the estimate
    double sigmas() const { return se > 0 ? std::abs(closed - mc) / se : 0.0; }
};

/// Estimates every Appendix-B sub-expectation (and the assembled moments of X
/// and Y) for one user by drawing channels through the physical pilot
/// pipeline, and pairs each with its closed form. The estimators never touch
/// the closed-form path.
std::vector<OracleTermResult> moment_oracle(const SyntheticCase& sc, long long n_draws,
                                            std::uint64_t chan_seed, int user = -1);

}  // namespace cfmimo

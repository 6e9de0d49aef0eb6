#pragma once

#include <Eigen/Dense>

namespace cfmimo {

/// Scale parameters of a sum of independent exponentials (means alpha_i).
/// Construction enforces positivity and nudges near-equal pairs apart with a
/// deterministic relative jitter, since the partial-fraction CDF assumes
/// pairwise-distinct scales.
struct HypoExpParams {
    Eigen::VectorXd scales;
};

HypoExpParams make_hypoexp(Eigen::VectorXd scales);

/// CDF of W = sum Exp(alpha_i) at d:
///   sum_i [alpha_i^{n-1} / prod_{j != i}(alpha_i - alpha_j)] (1 - e^{-d/alpha_i})
/// for d >= 0, else 0. The CDF is invariant under (alpha, d) -> (c alpha, c d),
/// so the products are evaluated in units of max(alpha); the alternating sum
/// switches to log-magnitude/sign accumulation when they still leave double
/// range. Never NaN; clamped into [0, 1].
double hypoexp_cdf(const HypoExpParams& p, double d);

/// Allocation-free entry for hot loops: applies the degeneracy nudge only
/// when a collision is actually present.
double hypoexp_cdf(const Eigen::Ref<const Eigen::VectorXd>& scales, double d);

}  // namespace cfmimo

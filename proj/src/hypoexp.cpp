#include "cfmimo/hypoexp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>
#include <stdexcept>

namespace cfmimo {

namespace {

/// Deterministic relative nudge keeping pairwise distances above
/// 1e-9 * max(scales); index-ordered so results are reproducible.
int nudge_collisions(double* a, int n, int bumps_start) {
    double amax = 0.0;
    for (int i = 0; i < n; ++i) amax = std::max(amax, a[i]);
    const double tol = 1e-9 * amax;
    int bumps = bumps_start;
    for (int pass = 0; pass < 4; ++pass) {
        bool touched = false;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (std::abs(a[i] - a[j]) < tol) {
                    const int sm = a[i] <= a[j] ? i : j;
                    a[sm] *= 1.0 - 1e-7 * (++bumps);
                    touched = true;
                }
            }
        }
        if (!touched) break;
    }
    return bumps;
}

bool has_collision(const double* a, int n) {
    double amax = 0.0;
    for (int i = 0; i < n; ++i) amax = std::max(amax, a[i]);
    const double tol = 1e-9 * amax;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(a[i] - a[j]) < tol) return true;
    return false;
}

/// Partial-fraction CDF over pairwise-distinct positive scales. The CDF is
/// invariant under (alpha, d) -> (c alpha, c d); evaluating in units of
/// max(alpha) keeps the products representable for the typical spreads, and
/// the log-magnitude/sign form takes over when they are not.
double cdf_prepared(const double* a, int n, double d) {
    if (!(d > 0.0)) return 0.0;
    if (n == 1) return -std::expm1(-d / a[0]);

    double amax = 0.0;
    for (int i = 0; i < n; ++i) amax = std::max(amax, a[i]);

    double sum = 0.0, comp = 0.0;
    bool overflow = false;
    for (int i = 0; i < n; ++i) {
        const double ai = a[i] / amax;
        double num = 1.0, den = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            num *= ai;
            den *= ai - a[j] / amax;
        }
        const double mag = std::abs(den);
        if (!(mag > 1e-280) || mag > 1e280 || num < 1e-280) {
            overflow = true;
            break;
        }
        const double term = num / den * (-std::expm1(-d / a[i]));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value = sum;

    if (overflow) {
        // log-magnitude/sign accumulation
        double lmax = -std::numeric_limits<double>::infinity();
        thread_local std::vector<double> logmag;
        thread_local std::vector<int> sign;
        logmag.assign(n, 0.0);
        sign.assign(n, 1);
        for (int i = 0; i < n; ++i) {
            double lm = (n - 1) * std::log(a[i]);
            int s = 1;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double diff = a[i] - a[j];
                lm -= std::log(std::abs(diff));
                if (diff < 0) s = -s;
            }
            lm += std::log(-std::expm1(-d / a[i]));
            logmag[i] = lm;
            sign[i] = s;
            lmax = std::max(lmax, lm);
        }
        if (!std::isfinite(lmax)) return 0.0;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += sign[i] * std::exp(logmag[i] - lmax);
        value = std::exp(lmax) * acc;
    }

    if (std::isnan(value)) throw std::runtime_error("hypoexp_cdf: evaluation produced NaN");
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace

HypoExpParams make_hypoexp(Eigen::VectorXd scales) {
    const int n = static_cast<int>(scales.size());
    if (n < 1) throw std::invalid_argument("make_hypoexp: need at least one scale");
    for (int i = 0; i < n; ++i)
        if (!(scales(i) > 0) || !std::isfinite(scales(i)))
            throw std::invalid_argument("make_hypoexp: scales must be positive and finite");
    nudge_collisions(scales.data(), n, 0);
    return {std::move(scales)};
}

double hypoexp_cdf(const HypoExpParams& p, double d) {
    return cdf_prepared(p.scales.data(), static_cast<int>(p.scales.size()), d);
}

double hypoexp_cdf(const Eigen::Ref<const Eigen::VectorXd>& scales, double d) {
    const int n = static_cast<int>(scales.size());
    if (n < 1) throw std::invalid_argument("hypoexp_cdf: need at least one scale");
    if (n == 1 || !has_collision(scales.data(), n))
        return cdf_prepared(scales.data(), n, d);
    // collisions are rare; copy and nudge only then
    Eigen::VectorXd nudged = scales;
    nudge_collisions(nudged.data(), n, 0);
    return cdf_prepared(nudged.data(), n, d);
}

}  // namespace cfmimo

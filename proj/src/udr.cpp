#include "cfmimo/udr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfmimo/quadrature.hpp"

namespace cfmimo {

namespace {

constexpr double kXMax = 40.0;  // e^{-40} is far below double-precision relevance
constexpr double kIntegralTol = 1e-10;
constexpr int kLaguerreNodes = 96;
constexpr int kLegendreNodes = 96;

/// Roots of a x^2 + b x + c with a > 0, cancellation-safe ("q method").
/// Returns false when the discriminant is <= 0 (quadratic positive a.e.).
bool quadratic_roots(double a, double b, double c, double& r_lo, double& r_hi) {
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) return false;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
    double r1 = q / a;
    double r2 = (q != 0.0) ? c / q : -b / a - r1;
    if (r1 > r2) std::swap(r1, r2);
    r_lo = r1;
    r_hi = r2;
    return true;
}

/// Subintervals of [0, xmax] where a x^2 + b x + c > 0 (a > 0).
std::vector<std::pair<double, double>> positive_segments(double a, double b, double c,
                                                         double xmax) {
    double r1, r2;
    std::vector<std::pair<double, double>> segs;
    if (!quadratic_roots(a, b, c, r1, r2)) {
        segs.emplace_back(0.0, xmax);
        return segs;
    }
    if (r1 > 0.0) segs.emplace_back(0.0, std::min(r1, xmax));
    if (r2 < xmax) segs.emplace_back(std::max(r2, 0.0), xmax);
    return segs;
}

int resolve_target(int target, int K) {
    const int t = target < 0 ? K - 1 : target;
    if (t < 0 || t >= K) throw std::invalid_argument("target user index out of range");
    return t;
}

void require_orthogonal(const SystemConfig& cfg, const char* who) {
    if (cfg.pilot_mode != PilotMode::orthogonal)
        throw std::logic_error(std::string(who) + " requires orthogonal pilot mode");
    if (cfg.K < 2) throw std::invalid_argument(std::string(who) + " requires K >= 2");
}

}  // namespace

UdrConstants make_udr_constants(const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& beta,
                                double rho_u, double T, int N, int target) {
    const int M = static_cast<int>(gamma.rows());
    const int K = static_cast<int>(gamma.cols());
    const int t = resolve_target(target, K);
    if (!(T > 0)) throw std::invalid_argument("make_udr_constants: threshold must be > 0");
    const int KI = K - 1;
    const Eigen::VectorXd gk = gamma.col(t);
    const double s1 = gk.sum();

    // S_m = rho_u sum_i (beta_mi - gamma_mi) + 1
    Eigen::VectorXd S(M);
    for (int m = 0; m < M; ++m) S(m) = rho_u * (beta.row(m) - gamma.row(m)).sum() + 1.0;
    const double ssg = S.dot(gk);

    UdrConstants uc;
    uc.c1.resize(KI, M);
    uc.c2.resize(KI, M);
    uc.c5.resize(M);
    uc.c6.resize(M);
    uc.c7.resize(M);
    uc.c8.resize(M);
    uc.c9.resize(M);
    uc.c10.resize(M);
    uc.ci.resize(KI);

    int a = 0;
    for (int i = 0; i < K; ++i) {
        if (i == t) continue;
        const double sg = gk.dot(gamma.col(i));
        uc.ci(a) = N * sg;
        for (int m = 0; m < M; ++m) {
            const double c1 = gk(m) * gamma(m, i);
            uc.c1(a, m) = c1;
            uc.c2(a, m) = (N - 1) * c1 + N * (sg - c1);
        }
        ++a;
    }
    for (int m = 0; m < M; ++m) {
        uc.c5(m) = gk(m) * gk(m) / T;
        uc.c6(m) = (N - 1) * gk(m) + N * (s1 - gk(m));
        uc.c7(m) = S(m) * gk(m);
        uc.c8(m) = (N - 1) * uc.c7(m) + N * (ssg - uc.c7(m));
        uc.c9(m) = 2.0 * uc.c6(m) * gk(m) / T - uc.c7(m) / rho_u;
        uc.c10(m) = uc.c6(m) * uc.c6(m) / T - uc.c8(m) / rho_u;
    }
    uc.c3.resize(M);
    uc.c4.resize(M);
    for (int m = 0; m < M; ++m) {
        uc.c3[m].resize(KI, KI);
        uc.c4[m].resize(KI, KI);
        for (int i = 0; i < KI; ++i)
            for (int j = 0; j < KI; ++j) {
                uc.c3[m](i, j) = uc.c1(i, m) - uc.c1(j, m);
                uc.c4[m](i, j) = uc.c2(i, m) - uc.c2(j, m);
            }
    }
    uc.ckt = N * N * s1 * s1 / T - N / rho_u * ssg;
    return uc;
}

UdrResult outage_udr(const EstimationStats& es, const Deployment& dep, const SystemConfig& cfg,
                     double T, int target, QuadBackend backend) {
    require_orthogonal(cfg, "outage_udr");
    const int t = resolve_target(target, cfg.K);
    const UdrConstants uc =
        make_udr_constants(es.gamma, dep.beta, dep.rho_u, T, cfg.N, t);
    const int M = cfg.M;
    const double mn = static_cast<double>(cfg.M) * cfg.N;

    double integral_sum = 0.0;
    Eigen::VectorXd theta(cfg.K - 1);
    const auto bracket = [&](int m, double x) {
        theta = uc.c1.col(m) * x + uc.c2.col(m);
        const double quad = (uc.c5(m) * x + uc.c9(m)) * x + uc.c10(m);
        if (quad <= 0.0) return 0.0;
        return hypoexp_cdf(theta, quad);
    };

    for (int m = 0; m < M; ++m) {
        const auto segs = positive_segments(uc.c5(m), uc.c9(m), uc.c10(m), kXMax);
        double im = 0.0;
        for (const auto& [a, b] : segs) {
            if (!(b > a)) continue;
            if (backend == QuadBackend::adaptive_gk) {
                im += integrate_gk15(
                    [&](double x) { return bracket(m, x) * std::exp(-x); }, a, b, kIntegralTol);
            } else if (b >= kXMax) {
                // tail segment: shifted Gauss-Laguerre on [a, inf)
                const QuadRule rule = gauss_laguerre(kLaguerreNodes);
                double acc = 0.0;
                for (int q = 0; q < rule.nodes.size(); ++q)
                    acc += rule.weights(q) * bracket(m, a + rule.nodes(q));
                im += acc * std::exp(-a);
            } else {
                const QuadRule rule = gauss_legendre(kLegendreNodes);
                const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
                double acc = 0.0;
                for (int q = 0; q < rule.nodes.size(); ++q) {
                    const double x = mid + half * rule.nodes(q);
                    acc += rule.weights(q) * bracket(m, x) * std::exp(-x);
                }
                im += acc * half;
            }
        }
        integral_sum += im;
    }

    const double correction = hypoexp_cdf(uc.ci, uc.ckt);
    const double raw = 1.0 - cfg.N * integral_sum + (mn - 1.0) * correction;

    UdrResult res;
    res.op = std::clamp(raw, 0.0, 1.0);
    res.clamp_amount = std::max(0.0, std::max(-raw, raw - 1.0));
    return res;
}

double outage_exact_smallcase(const EstimationStats& es, const Deployment& dep,
                              const SystemConfig& cfg, double T, int target) {
    require_orthogonal(cfg, "outage_exact_smallcase");
    if (!(T > 0)) throw std::invalid_argument("outage_exact_smallcase: threshold must be > 0");
    const int dim = cfg.M * cfg.N;
    if (dim > 4)
        throw std::invalid_argument(
            "outage_exact_smallcase handles MN <= 4 only; use outage_udr for larger systems");
    const int t = resolve_target(target, cfg.K);
    const int M = cfg.M, N = cfg.N, KI = cfg.K - 1;
    const double rho = dep.rho_u;

    const Eigen::VectorXd gk = es.gamma.col(t);
    Eigen::MatrixXd gi(M, KI);
    {
        int a = 0;
        for (int i = 0; i < cfg.K; ++i) {
            if (i == t) continue;
            gi.col(a++) = es.gamma.col(i);
        }
    }
    Eigen::VectorXd S(M);
    for (int m = 0; m < M; ++m) S(m) = rho * (dep.beta.row(m) - es.gamma.row(m)).sum() + 1.0;

    Eigen::VectorXd x(dim);
    const int m_last = (dim - 1) / N;

    // Integral over the innermost coordinate for fixed outer coordinates:
    // delta is quadratic in x_last, so split at its roots analytically.
    const auto innermost = [&]() {
        Eigen::VectorXd tpart = Eigen::VectorXd::Zero(M);
        for (int j = 0; j + 1 < dim; ++j) tpart(j / N) += x(j);
        const double a0 = gk.dot(tpart);
        const double b0 = (S.cwiseProduct(gk)).dot(tpart);
        Eigen::VectorXd theta0(KI);
        for (int a = 0; a < KI; ++a) theta0(a) = gi.col(a).cwiseProduct(gk).dot(tpart);

        const double cl = gk(m_last);
        const double aq = rho * cl * cl;
        const double bq = 2.0 * rho * cl * a0 - T * S(m_last) * cl;
        const double cq = rho * a0 * a0 - T * b0;

        Eigen::VectorXd theta(KI);
        const auto f = [&](double xl) {
            const double num = (aq * xl + bq) * xl + cq;
            if (num <= 0.0) return 0.0;
            for (int a = 0; a < KI; ++a)
                theta(a) = theta0(a) + xl * gk(m_last) * gi(m_last, a);
            return hypoexp_cdf(theta, num / (T * rho)) * std::exp(-xl);
        };
        double acc = 0.0;
        for (const auto& [a, b] : positive_segments(aq, bq, cq, kXMax))
            if (b > a) acc += integrate_gk15(f, a, b, 1e-9);
        return acc;
    };

    double expectation = 0.0;
    if (dim == 1) {
        expectation = innermost();
    } else if (dim == 2) {
        expectation = integrate_gk15(
            [&](double x0) {
                x(0) = x0;
                return innermost() * std::exp(-x0);
            },
            0.0, kXMax, 1e-7);
    } else {
        // 3- and 4-fold cases: tensor Gauss-Laguerre across the outer
        // coordinates, adaptive with root-splitting on the innermost one.
        const QuadRule rule = gauss_laguerre(48);
        const int outer = dim - 1;
        std::function<double(int)> level = [&](int j) -> double {
            if (j == outer) return innermost();
            double acc = 0.0;
            for (int q = 0; q < rule.nodes.size(); ++q) {
                x(j) = rule.nodes(q);
                acc += rule.weights(q) * level(j + 1);
            }
            return acc;
        };
        expectation = level(0);
    }
    return std::clamp(1.0 - expectation, 0.0, 1.0);
}

MmimoConstants make_mmimo_constants(const Eigen::VectorXd& beta_all,
                                    const Eigen::VectorXd& gamma_all, const SystemConfig& cfg,
                                    double T, int target) {
    const int K = static_cast<int>(gamma_all.size());
    if (beta_all.size() != K) throw std::invalid_argument("make_mmimo_constants: size mismatch");
    if (K < 2) throw std::invalid_argument("make_mmimo_constants: K >= 2 required");
    if (!(T > 0)) throw std::invalid_argument("make_mmimo_constants: threshold must be > 0");
    const int t = resolve_target(target, K);
    const double mn = static_cast<double>(cfg.M) * cfg.N;
    const double rho = normalized_snr_uplink(cfg);
    const double gk = gamma_all(t);
    const double S = rho * (beta_all - gamma_all).sum() + 1.0;

    Eigen::VectorXd gi(K - 1);
    {
        int a = 0;
        for (int i = 0; i < K; ++i)
            if (i != t) gi(a++) = gamma_all(i);
    }
    // equal interferer gammas break the partial fractions; same deterministic
    // nudge as the hypoexponential CDF
    gi = make_hypoexp(gi).scales;

    MmimoConstants mc;
    const int KI = K - 1;
    mc.d1.resize(KI);
    mc.d2.resize(KI);
    mc.d3.resize(KI);
    for (int a = 0; a < KI; ++a) {
        double denom = 1.0;
        for (int b = 0; b < KI; ++b)
            if (b != a) denom *= gi(a) - gi(b);
        mc.d1(a) = std::pow(gi(a), K - 2) / denom;
        mc.d2(a) = gk / (T * gi(a));
        mc.d3(a) = (mn - 1.0) * gk / (T * gi(a)) - S / (rho * gi(a));
    }
    mc.d4 = gk * gk / T;
    mc.d5 = 2.0 * (mn - 1.0) * gk * gk / T - gk * S / rho;
    mc.d6 = (mn - 1.0) * gk * ((mn - 1.0) * gk / T - S / rho);
    const double disc = mc.d5 * mc.d5 - 4.0 * mc.d4 * mc.d6;
    mc.kappa = (-mc.d5 + std::sqrt(std::max(disc, 0.0))) / (2.0 * mc.d4);
    mc.threshold_split = rho * (mn - 1.0) * gk / S;
    return mc;
}

double outage_mmimo_closed_form(const Eigen::VectorXd& beta_all,
                                const Eigen::VectorXd& gamma_all, const SystemConfig& cfg,
                                double T, int target) {
    if (cfg.pilot_mode != PilotMode::orthogonal)
        throw std::logic_error("outage_mmimo_closed_form requires orthogonal pilot mode");
    const MmimoConstants mc = make_mmimo_constants(beta_all, gamma_all, cfg, T, target);
    const double mn = static_cast<double>(cfg.M) * cfg.N;
    const int KI = static_cast<int>(mc.d1.size());

    double correction = 0.0;
    if (mc.d4 + mc.d5 + mc.d6 > 0.0) {
        for (int a = 0; a < KI; ++a)
            correction += mc.d1(a) * (1.0 - std::exp(-(mc.d2(a) + mc.d3(a))));
    }

    double main = 0.0;
    if (T <= mc.threshold_split) {
        for (int a = 0; a < KI; ++a)
            main += mc.d1(a) * (1.0 - std::exp(-mc.d3(a)) / (mc.d2(a) + 1.0));
    } else {
        const double kappa = mc.kappa;
        for (int a = 0; a < KI; ++a) {
            // both exponents are <= 0 in this branch (-d3 - kappa(d2+1) == -kappa)
            main += mc.d1(a) * (std::exp(-kappa) -
                                std::exp(-mc.d3(a) - kappa * (mc.d2(a) + 1.0)) /
                                    (mc.d2(a) + 1.0));
        }
    }
    const double raw = 1.0 - mn * main + (mn - 1.0) * correction;
    return std::clamp(raw, 0.0, 1.0);
}

double udr_expectation_exp(const std::function<double(const Eigen::VectorXd&)>& g, int dim,
                           double abs_tol) {
    if (dim < 1) throw std::invalid_argument("udr_expectation_exp: dim must be >= 1");
    Eigen::VectorXd v = Eigen::VectorXd::Ones(dim);
    const double base = g(v);
    double acc = 0.0;
    for (int j = 0; j < dim; ++j) {
        acc += integrate_gk15(
            [&](double x) {
                v(j) = x;
                const double val = g(v) * std::exp(-x);
                return val;
            },
            0.0, kXMax, abs_tol);
        v(j) = 1.0;
    }
    return acc - (dim - 1) * base;
}

}  // namespace cfmimo

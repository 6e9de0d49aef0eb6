#include "cfmimo/lognormal.hpp"

#include <numbers>

namespace cfmimo {

double rate_lognormal(const LogNormalParams& p, double abs_tol) {
    const double mu = p.mu, sigma = p.sigma;
    if (!(sigma >= 0)) throw std::invalid_argument("rate_lognormal: sigma must be >= 0");
    if (sigma < 1e-12) return softplus(mu) / std::numbers::ln2;

    const double inv = 1.0 / (sigma * std::numbers::sqrt2);
    const double span = 12.0 * sigma;
    const double i_minus = integrate_gk15(
        [&](double x) { return std::erfc((mu - x) * inv) * logistic(x); }, mu - span, mu,
        abs_tol);
    const double i_plus = integrate_gk15(
        [&](double x) { return std::erfc((x - mu) * inv) * logistic(x); }, mu, mu + span,
        abs_tol);
    return (2.0 * softplus(mu) - i_minus + i_plus) / (2.0 * std::numbers::ln2);
}

double rate_lognormal_hermite(const LogNormalParams& p, int n_nodes) {
    const QuadRule rule = gauss_hermite(n_nodes);
    double acc = 0.0;
    for (int i = 0; i < n_nodes; ++i)
        acc += rule.weights(i) * softplus(p.mu + std::numbers::sqrt2 * p.sigma * rule.nodes(i));
    return acc / (std::sqrt(std::numbers::pi) * std::numbers::ln2);
}

std::pair<double, double> rate_bounds(const LogNormalParams& p) {
    const double lower = softplus(p.mu) / std::numbers::ln2;
    // e^{-mu} / (1 + e^{-2 mu}) = 1 / (2 cosh(mu)), stable for any mu
    const double gap = std::expm1(0.5 * p.sigma * p.sigma) /
                       (std::numbers::ln2 * 2.0 * std::cosh(p.mu));
    return {lower, lower + gap};
}

double rate_uatf(const EstimationStats& es, const Deployment& dep, const PilotBook& pb,
                 const SystemConfig& cfg, int k) {
    if (k < 0 || k >= cfg.K) throw std::invalid_argument("rate_uatf: bad user index");
    const double rho = dep.rho_u;
    const double N = cfg.N;
    const double sqrt_trp = std::sqrt(cfg.tau_p * dep.rho_p);

    const double gsum = es.gamma.col(k).sum();
    const double desired = rho * N * N * gsum * gsum;

    double coherent = 0.0;
    for (int i = 0; i < cfg.K; ++i) {
        if (i == k) continue;
        // sqrt(tau_p rho_p) c_mk beta_mi = gamma_mk beta_mi / beta_mk
        double amp = 0.0;
        for (int m = 0; m < cfg.M; ++m) amp += sqrt_trp * es.c(m, k) * dep.beta(m, i);
        coherent += std::norm(pb.gram(k, i)) * amp * amp;
    }
    double noncoherent = 0.0;
    for (int m = 0; m < cfg.M; ++m)
        for (int i = 0; i < cfg.K; ++i) noncoherent += es.gamma(m, k) * dep.beta(m, i);

    const double den = rho * N * N * coherent + rho * N * noncoherent + N * gsum;
    const double sinr = desired / den;
    return std::log1p(sinr) / std::numbers::ln2;
}

}  // namespace cfmimo

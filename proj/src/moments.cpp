#include "cfmimo/moments.hpp"

namespace cfmimo {

double pochhammer(double a, int n) {
    double p = 1.0;
    for (int j = 0; j < n; ++j) p *= a + j;
    return p;
}

SubExpectations sub_expectations(const EstimationStats& es, const Deployment& dep,
                                 const SystemConfig& cfg, int k) {
    if (k < 0 || k >= cfg.K) throw std::invalid_argument("sub_expectations: bad user index");
    const auto in = detail::make_moment_inputs<double>(es, dep, cfg.N);
    return detail::appendix_sub_expectations(in, k);
}

MomentSet moments_general(const EstimationStats& es, const Deployment& dep,
                          const SystemConfig& cfg, int k) {
    if (k < 0 || k >= cfg.K) throw std::invalid_argument("moments_general: bad user index");
    const auto in = detail::make_moment_inputs<double>(es, dep, cfg.N);
    const auto subs = detail::appendix_sub_expectations(in, k);
    return detail::assemble_moments(subs, in, k);
}

MomentSet moments_npc(const EstimationStats& es, const Deployment& dep,
                      const SystemConfig& cfg, int k) {
    if (cfg.pilot_mode != PilotMode::orthogonal)
        throw std::logic_error("moments_npc requires orthogonal pilot mode");
    if (k < 0 || k >= cfg.K) throw std::invalid_argument("moments_npc: bad user index");

    const int M = cfg.M, K = cfg.K;
    const double N = cfg.N;
    const double rho = dep.rho_u;
    const Eigen::VectorXd gk = es.gamma.col(k);
    const Eigen::VectorXd w = (dep.beta - es.gamma).rowwise().sum();

    detail::Kahan<double> s1k, s2k, s3k, s4k, wgk, w2g2k, wg2k, wg3k, gsum2k;
    for (int m = 0; m < M; ++m) {
        const double g = gk(m), wm = w(m);
        s1k.add(g);
        s2k.add(g * g);
        s3k.add(g * g * g);
        s4k.add(g * g * g * g);
        wgk.add(wm * g);
        w2g2k.add(wm * wm * g * g);
        wg2k.add(wm * g * g);
        wg3k.add(wm * g * g * g);
        double gi_sum = 0;
        for (int i = 0; i < K; ++i)
            if (i != k) gi_sum += es.gamma(m, i);
        gsum2k.add(g * g * gi_sum * gi_sum);
    }
    const double s1 = s1k.sum, s2 = s2k.sum, s3 = s3k.sum, s4 = s4k.sum;

    const double ea = N * s1;
    const double ea2 = N * s2 + N * N * s1 * s1;
    const double ea3 = 2 * N * s3 + 3 * N * N * s2 * s1 + N * N * N * s1 * s1 * s1;
    const double ec = N * wgk.sum;
    const double ec2 = N * w2g2k.sum + ec * ec;
    const double eac = N * wg2k.sum + ea * ec;
    const double ea2c = 2 * N * wg3k.sum + 2 * N * N * wg2k.sum * s1 + ea2 * ec;

    double eb_sum = 0, eba_sum = 0, ebc_sum = 0, ea2b_sum = 0, diag_b2 = 0;
    for (int i = 0; i < K; ++i) {
        if (i == k) continue;
        detail::Kahan<double> sggi, sg2gi, sg3gi, swg2gi, sg2gi2;
        for (int m = 0; m < M; ++m) {
            const double g = gk(m), gi = es.gamma(m, i), wm = w(m);
            sggi.add(g * gi);
            sg2gi.add(g * g * gi);
            sg3gi.add(g * g * g * gi);
            swg2gi.add(wm * g * g * gi);
            sg2gi2.add(g * g * gi * gi);
        }
        const double eb = N * sggi.sum;
        eb_sum += eb;
        eba_sum += N * sg2gi.sum + ea * eb;
        ebc_sum += N * swg2gi.sum + ec * eb;
        ea2b_sum += ea2 * eb + 2 * N * sg3gi.sum + 2 * N * N * s1 * sg2gi.sum;
        diag_b2 += N * sg2gi2.sum + N * N * sggi.sum * sggi.sum;
    }
    const double esumb2 = N * gsum2k.sum + diag_b2 + eb_sum * eb_sum;

    MomentSet ms;
    ms.ex = rho * N * (s2 + N * s1 * s1);
    ms.ex2 = ms.ex * ms.ex +
             rho * rho * (6 * N * s4 + 8 * N * N * s3 * s1 + 2 * N * N * s2 * s2 +
                          4 * N * N * N * s2 * s1 * s1);
    ms.ey = rho * eb_sum + ea + rho * ec;
    ms.ey2 = rho * rho * esumb2 + ea2 + rho * rho * ec2 + 2 * rho * eba_sum +
             2 * rho * eac + 2 * rho * rho * ebc_sum;
    ms.exy = rho * rho * ea2b_sum + rho * ea3 + rho * rho * ea2c;
    return ms;
}

MomentSet moments_mmimo(double gamma_k, const Eigen::VectorXd& beta_all,
                        const Eigen::VectorXd& gamma_all, const SystemConfig& cfg, int k) {
    const int K = static_cast<int>(gamma_all.size());
    if (beta_all.size() != K || k < 0 || k >= K)
        throw std::invalid_argument("moments_mmimo: inconsistent inputs");
    const double mn = static_cast<double>(cfg.M) * cfg.N;
    const double rho = normalized_snr_uplink(cfg);

    double s_gamma = 0, s_gamma2 = 0, w = 0;
    for (int i = 0; i < K; ++i) {
        w += beta_all(i) - gamma_all(i);
        if (i == k) continue;
        s_gamma += gamma_all(i);
        s_gamma2 += gamma_all(i) * gamma_all(i);
    }

    MomentSet ms;
    ms.ex = rho * pochhammer(mn, 2) * gamma_k * gamma_k;
    ms.ex2 = rho * rho * pochhammer(mn, 4) * std::pow(gamma_k, 4.0);
    const double load = rho * s_gamma + 1.0 + rho * w;
    ms.ey = mn * gamma_k * load;
    ms.ey2 = pochhammer(mn, 2) * gamma_k * gamma_k *
             (rho * rho * (s_gamma2 + s_gamma * s_gamma) + (1.0 + rho * w) * (1.0 + rho * w) +
              2.0 * rho * (1.0 + rho * w) * s_gamma);
    ms.exy = rho * pochhammer(mn, 3) * std::pow(gamma_k, 3.0) * load;
    return ms;
}

}  // namespace cfmimo

#include "cfmimo/estimation.hpp"

#include <cmath>
#include <stdexcept>

namespace cfmimo {

EstimationStats estimation_stats(const Deployment& dep, const PilotBook& pb,
                                 const SystemConfig& cfg) {
    if (dep.beta.rows() != cfg.M || dep.beta.cols() != cfg.K ||
        pb.phi.rows() != cfg.K || pb.phi.cols() != cfg.tau_p)
        throw std::invalid_argument("estimation_stats: inconsistent dimensions");

    const double trp = cfg.tau_p * dep.rho_p;
    const double sqrt_trp = std::sqrt(trp);
    const Eigen::MatrixXd gram2 = pb.gram.cwiseAbs2();  // |phi_k^H phi_i|^2

    EstimationStats es;
    es.c.resize(cfg.M, cfg.K);
    es.gamma.resize(cfg.M, cfg.K);
    es.nu.resize(cfg.M);
    for (int m = 0; m < cfg.M; ++m) {
        for (int k = 0; k < cfg.K; ++k) {
            double den = 1.0;
            for (int i = 0; i < cfg.K; ++i) den += trp * dep.beta(m, i) * gram2(k, i);
            es.c(m, k) = sqrt_trp * dep.beta(m, k) / den;
            es.gamma(m, k) = sqrt_trp * dep.beta(m, k) * es.c(m, k);
        }
        // C_y = tau_p rho_p sum_j beta_mj phi_j phi_j^H + I  (tau_p x tau_p)
        Eigen::MatrixXcd cy = (trp * pb.phi.transpose() *
                               dep.beta.row(m).asDiagonal() * pb.phi.conjugate());
        cy += Eigen::MatrixXcd::Identity(cfg.tau_p, cfg.tau_p);
        // proj(i, k) = phi_i^H C_y phi_k
        const Eigen::MatrixXcd proj = pb.phi.conjugate() * cy * pb.phi.transpose();
        es.nu[m].resize(cfg.K, cfg.K);
        for (int k = 0; k < cfg.K; ++k)
            for (int i = 0; i < cfg.K; ++i)
                es.nu[m](k, i) = es.c(m, k) * es.c(m, i) * proj(i, k);
    }
    return es;
}

void draw_channels_into(ChannelRealization& out, const Deployment& dep,
                        const EstimationStats& es, const PilotBook& pb,
                        const SystemConfig& cfg, Rng& rng) {
    const int M = cfg.M, N = cfg.N, K = cfg.K, T = cfg.tau_p;
    const double sqrt_trp = std::sqrt(cfg.tau_p * dep.rho_p);

    out.g.resize(M * N, K);
    out.g_hat.resize(M * N, K);
    out.lambda_err = dep.beta - es.gamma;

    thread_local Eigen::MatrixXcd w, yp, proj;
    w.resize(N, T);
    for (int m = 0; m < M; ++m) {
        auto gm = out.g.middleRows(m * N, N);
        for (int k = 0; k < K; ++k)
            for (int n = 0; n < N; ++n) gm(n, k) = rng.cnormal(dep.beta(m, k));
        for (int t = 0; t < T; ++t)
            for (int n = 0; n < N; ++n) w(n, t) = rng.cnormal(1.0);
        // Y_p,m = sqrt(tau_p rho_p) sum_k g_mk phi_k^H + W_p,m
        yp.noalias() = sqrt_trp * gm * pb.phi.conjugate();
        yp += w;
        // column k of proj is ycheck_p,mk = Y_p,m phi_k
        proj.noalias() = yp * pb.phi.transpose();
        auto ghm = out.g_hat.middleRows(m * N, N);
        for (int k = 0; k < K; ++k) ghm.col(k) = es.c(m, k) * proj.col(k);
    }
}

ChannelRealization draw_channels(const Deployment& dep, const EstimationStats& es,
                                 const PilotBook& pb, const SystemConfig& cfg,
                                 std::uint64_t seed) {
    Rng rng(seed);
    ChannelRealization out;
    draw_channels_into(out, dep, es, pb, cfg, rng);
    return out;
}

}  // namespace cfmimo

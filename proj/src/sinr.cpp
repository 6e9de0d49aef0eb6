#include "cfmimo/sinr.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "cfmimo/deployment.hpp"
#include "cfmimo/pilots.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

std::vector<double> thresholds_db_to_linear(const std::vector<double>& thresholds_db) {
    std::vector<double> lin(thresholds_db.size());
    for (size_t i = 0; i < thresholds_db.size(); ++i) {
        const double db = thresholds_db[i];
        if (std::isinf(db))
            lin[i] = db > 0 ? std::numeric_limits<double>::infinity() : 0.0;
        else
            lin[i] = std::pow(10.0, db / 10.0);
    }
    if (!std::is_sorted(lin.begin(), lin.end()))
        throw std::invalid_argument("thresholds must be sorted ascending");
    return lin;
}

double sinr_sample(const ChannelRealization& real, const EstimationStats& /*es*/,
                   const Deployment& dep, int k) {
    const int K = static_cast<int>(real.g_hat.cols());
    if (k < 0 || k >= K) throw std::invalid_argument("sinr_sample: bad user index");
    const int M = static_cast<int>(real.lambda_err.rows());
    const int N = static_cast<int>(real.g_hat.rows()) / M;
    const double rho = dep.rho_u;

    const auto gk = real.g_hat.col(k);
    const double p = gk.squaredNorm();
    const double x = rho * p * p;

    double interf = 0.0;
    for (int i = 0; i < K; ++i) {
        if (i == k) continue;
        interf += std::norm(gk.dot(real.g_hat.col(i)));
    }
    double noise = 0.0;
    for (int m = 0; m < M; ++m) {
        const double wn = rho * real.lambda_err.row(m).sum() + 1.0;
        noise += wn * gk.segment(m * N, N).squaredNorm();
    }
    const double y = rho * interf + noise;
    if (y == 0.0) throw std::runtime_error("sinr_sample: zero denominator");
    return x / y;
}

namespace {

struct Accum {
    // bucket[t] counts samples whose first exceeded threshold is t; prefix
    // sums give the outage counts
    std::vector<long long> bucket;
    double rate_sum = 0.0;
    double x_sum = 0, x_sq = 0, y_sum = 0, y_sq = 0;
};

DeploymentResult run_one_deployment(const SystemConfig& cfg, int n_iters,
                                    const std::vector<double>& thresholds_db,
                                    const std::vector<double>& thresholds_lin,
                                    std::uint64_t master_seed, int dep_index) {
    const Deployment dep =
        generate_deployment(cfg, derive_seed(master_seed, stream::geometry, dep_index));
    const PilotBook pb =
        build_pilot_book(cfg, derive_seed(master_seed, stream::pilots, dep_index));
    const EstimationStats es = estimation_stats(dep, pb, cfg);
    Rng rng(derive_seed(master_seed, stream::channels, dep_index));

    const int M = cfg.M, N = cfg.N, K = cfg.K;
    const int nt = static_cast<int>(thresholds_lin.size());
    const double rho = dep.rho_u;

    Eigen::VectorXd wn(M);
    const Eigen::MatrixXd lambda_err = dep.beta - es.gamma;
    for (int m = 0; m < M; ++m) wn(m) = rho * lambda_err.row(m).sum() + 1.0;

    std::vector<Accum> acc(K);
    for (auto& a : acc) a.bucket.assign(nt + 1, 0);

    ChannelRealization real;
    Eigen::MatrixXcd gram(K, K);
    Eigen::MatrixXd ap_norms(M, K);
    for (int it = 0; it < n_iters; ++it) {
        draw_channels_into(real, dep, es, pb, cfg, rng);
        gram.noalias() = real.g_hat.adjoint() * real.g_hat;
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k)
                ap_norms(m, k) = real.g_hat.col(k).segment(m * N, N).squaredNorm();
        for (int k = 0; k < K; ++k) {
            const double p = gram(k, k).real();
            const double x = rho * p * p;
            double interf = 0.0;
            for (int i = 0; i < K; ++i)
                if (i != k) interf += std::norm(gram(k, i));
            double noise = 0.0;
            for (int m = 0; m < M; ++m) noise += wn(m) * ap_norms(m, k);
            const double y = rho * interf + noise;
            const double lambda = x / y;

            auto& a = acc[k];
            const auto pos = std::upper_bound(thresholds_lin.begin(), thresholds_lin.end(),
                                              lambda) -
                             thresholds_lin.begin();
            a.bucket[pos] += 1;
            a.rate_sum += std::log1p(lambda) / std::numbers::ln2;
            a.x_sum += x;
            a.x_sq += x * x;
            a.y_sum += y;
            a.y_sq += y * y;
        }
    }

    DeploymentResult out;
    out.per_user.resize(K);
    out.xy.resize(K);
    for (int k = 0; k < K; ++k) {
        auto& curve = out.per_user[k];
        curve.thresholds_db = thresholds_db;
        curve.op.resize(nt);
        curve.samples = n_iters;
        long long below = 0;
        for (int t = 0; t < nt; ++t) {
            below += acc[k].bucket[t];
            curve.op[t] = static_cast<double>(below) / n_iters;
        }
        curve.rate_bits = acc[k].rate_sum / n_iters;
        const double n = n_iters;
        const double xm = acc[k].x_sum / n, ym = acc[k].y_sum / n;
        const double xvar = std::max(0.0, acc[k].x_sq / n - xm * xm);
        const double yvar = std::max(0.0, acc[k].y_sq / n - ym * ym);
        out.xy[k] = {xm, std::sqrt(xvar / n), ym, std::sqrt(yvar / n)};
    }
    return out;
}

}  // namespace

MonteCarloResult run_monte_carlo(const SystemConfig& cfg, int n_deployments, int n_iters,
                                 const std::vector<double>& thresholds_db,
                                 std::uint64_t master_seed, int n_threads) {
    validate(cfg);
    if (n_deployments < 1 || n_iters < 1)
        throw std::invalid_argument("run_monte_carlo: counts must be >= 1");
    const std::vector<double> thresholds_lin = thresholds_db_to_linear(thresholds_db);

    MonteCarloResult result;
    result.per_deployment.resize(n_deployments);

    const int workers = std::max(1, n_threads);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int d = next.fetch_add(1);
            if (d >= n_deployments) break;
            result.per_deployment[d] = run_one_deployment(cfg, n_iters, thresholds_db,
                                                          thresholds_lin, master_seed, d);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    // fixed-order reduction: deployments ascending, then users
    const int K = cfg.K;
    const int nt = static_cast<int>(thresholds_db.size());
    result.per_user.assign(K, EmpiricalCurve{});
    for (int k = 0; k < K; ++k) {
        auto& c = result.per_user[k];
        c.thresholds_db = thresholds_db;
        c.op.assign(nt, 0.0);
        c.samples = static_cast<long long>(n_deployments) * n_iters;
        for (int d = 0; d < n_deployments; ++d) {
            const auto& src = result.per_deployment[d].per_user[k];
            for (int t = 0; t < nt; ++t) c.op[t] += src.op[t];
            c.rate_bits += src.rate_bits;
        }
        for (int t = 0; t < nt; ++t) c.op[t] /= n_deployments;
        c.rate_bits /= n_deployments;
    }
    result.system.thresholds_db = thresholds_db;
    result.system.op.assign(nt, 0.0);
    result.system.samples = static_cast<long long>(n_deployments) * n_iters * K;
    for (int k = 0; k < K; ++k) {
        for (int t = 0; t < nt; ++t) result.system.op[t] += result.per_user[k].op[t];
        result.system.rate_bits += result.per_user[k].rate_bits;
    }
    for (int t = 0; t < nt; ++t) result.system.op[t] /= K;
    result.system.rate_bits /= K;
    return result;
}

}  // namespace cfmimo

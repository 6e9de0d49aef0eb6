#include "cfmimo/oracle.hpp"

#include <cmath>

#include "cfmimo/rng.hpp"

namespace cfmimo {

SyntheticCase make_synthetic_case(int M, int N, int K, int tau_p, PilotMode mode,
                                  std::uint64_t seed) {
    SyntheticCase sc;
    sc.cfg.M = M;
    sc.cfg.N = N;
    sc.cfg.K = K;
    sc.cfg.tau_p = tau_p;
    sc.cfg.pilot_mode = mode;

    Rng rng(seed);
    sc.dep.ap_xy.setZero(M, 2);
    sc.dep.ue_xy.setZero(K, 2);
    sc.dep.beta.resize(M, K);
    for (int m = 0; m < M; ++m)
        for (int k = 0; k < K; ++k) sc.dep.beta(m, k) = 0.2 + 1.8 * rng.uniform01();
    sc.dep.rho_p = 0.5 + 1.5 * rng.uniform01();
    sc.dep.rho_u = 0.5 + 1.5 * rng.uniform01();

    sc.pb = build_pilot_book(sc.cfg, derive_seed(seed, stream::pilots, 0));
    sc.es = estimation_stats(sc.dep, sc.pb, sc.cfg);
    return sc;
}

namespace {

struct MeanVar {
    double sum = 0.0, sumsq = 0.0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
    }
    double mean(long long n) const { return sum / n; }
    double se(long long n) const {
        const double m = sum / n;
        const double var = std::max(0.0, sumsq / n - m * m);
        return std::sqrt(var / n);
    }
};

}  // namespace

std::vector<OracleTermResult> moment_oracle(const SyntheticCase& sc, long long n_draws,
                                            std::uint64_t chan_seed, int user) {
    const auto& cfg = sc.cfg;
    const int M = cfg.M, N = cfg.N, K = cfg.K;
    const int k = user < 0 ? K - 1 : user;
    const double rho = sc.dep.rho_u;

    std::vector<int> intf;
    for (int i = 0; i < K; ++i)
        if (i != k) intf.push_back(i);
    const int KI = static_cast<int>(intf.size());

    const Eigen::VectorXd w = (sc.dep.beta - sc.es.gamma).rowwise().sum();

    MeanVar a2, a3, sumb2, c2, ac, a2c, xm, x2m, ym, y2m, xym;
    std::vector<MeanVar> b(KI), ba(KI), bc(KI), a2b(KI);

    Rng rng(chan_seed);
    ChannelRealization real;
    Eigen::VectorXd bvals(KI);
    for (long long it = 0; it < n_draws; ++it) {
        draw_channels_into(real, sc.dep, sc.es, sc.pb, cfg, rng);
        const auto gk = real.g_hat.col(k);
        double a_val = 0.0, c_val = 0.0;
        for (int m = 0; m < M; ++m) {
            const double nn = gk.segment(m * N, N).squaredNorm();
            a_val += nn;
            c_val += w(m) * nn;
        }
        double b_sum = 0.0;
        for (int i = 0; i < KI; ++i) {
            bvals(i) = std::norm(gk.dot(real.g_hat.col(intf[i])));
            b_sum += bvals(i);
        }
        a2.add(a_val * a_val);
        a3.add(a_val * a_val * a_val);
        sumb2.add(b_sum * b_sum);
        c2.add(c_val * c_val);
        ac.add(a_val * c_val);
        a2c.add(a_val * a_val * c_val);
        for (int i = 0; i < KI; ++i) {
            b[i].add(bvals(i));
            ba[i].add(bvals(i) * a_val);
            bc[i].add(bvals(i) * c_val);
            a2b[i].add(a_val * a_val * bvals(i));
        }
        const double x = rho * a_val * a_val;
        const double y = rho * b_sum + a_val + rho * c_val;
        xm.add(x);
        x2m.add(x * x);
        ym.add(y);
        y2m.add(y * y);
        xym.add(x * y);
    }

    const SubExpectations subs = sub_expectations(sc.es, sc.dep, cfg, k);
    const MomentSet ms = moments_general(sc.es, sc.dep, cfg, k);

    std::vector<OracleTermResult> out;
    const auto push = [&](const std::string& name, double closed, const MeanVar& mv) {
        out.push_back({name, closed, mv.mean(n_draws), mv.se(n_draws)});
    };
    push("E[A^2]", subs.ea2, a2);
    push("E[A^3]", subs.ea3, a3);
    push("E[C^2]", subs.ec2, c2);
    push("E[AC]", subs.eac, ac);
    push("E[A^2C]", subs.ea2c, a2c);
    push("E[(SumB)^2]", subs.esumb2, sumb2);
    for (int i = 0; i < KI; ++i) {
        const std::string tag = "^" + std::to_string(intf[i]) + "]";
        push("E[B" + tag, subs.eb[i], b[i]);
        push("E[B A" + tag, subs.eba[i], ba[i]);
        push("E[B C" + tag, subs.ebc[i], bc[i]);
        push("E[A^2 B" + tag, subs.ea2b[i], a2b[i]);
    }
    push("E[X]", ms.ex, xm);
    push("E[X^2]", ms.ex2, x2m);
    push("E[Y]", ms.ey, ym);
    push("E[Y^2]", ms.ey2, y2m);
    push("E[XY]", ms.exy, xym);
    return out;
}

}  // namespace cfmimo

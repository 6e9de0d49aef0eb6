#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cfmimo/moments.hpp"
#include "cfmimo/oracle.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;

TEST_CASE("pochhammer") {
    CHECK(pochhammer(3.0, 0) == 1.0);
    CHECK(pochhammer(4.0, 2) == 20.0);
    CHECK(pochhammer(8.0, 4) == 7920.0);
}

TEST_CASE("single-link moments reduce to the scalar formulas") {
    // M = N = K = 1: E[X] = 2 rho gamma^2, E[Y] = gamma (1 + rho (beta - gamma))
    SystemConfig cfg;
    cfg.M = cfg.N = cfg.K = cfg.tau_p = 1;
    Deployment dep;
    dep.beta = Eigen::MatrixXd::Constant(1, 1, 2.0);
    dep.rho_p = 0.7;
    dep.rho_u = 0.9;
    const PilotBook pb = build_pilot_book(cfg, 1);
    const EstimationStats es = estimation_stats(dep, pb, cfg);
    const double g = es.gamma(0, 0);
    const MomentSet ms = moments_general(es, dep, cfg, 0);
    CHECK(ms.ex == doctest::Approx(2.0 * dep.rho_u * g * g).epsilon(1e-12));
    CHECK(ms.ey ==
          doctest::Approx(g * (1.0 + dep.rho_u * (dep.beta(0, 0) - g))).epsilon(1e-12));
    CHECK(ms.ex2 == doctest::Approx(24.0 * dep.rho_u * dep.rho_u * std::pow(g, 4)).epsilon(1e-12));
}

TEST_CASE("orthogonal pilots: general formulas collapse onto the npc path") {
    for (std::uint64_t seed : {101, 102, 103}) {
        const SyntheticCase sc = make_synthetic_case(4, 2, 4, 4, PilotMode::orthogonal, seed);
        for (int k = 0; k < sc.cfg.K; ++k) {
            const MomentSet a = moments_general(sc.es, sc.dep, sc.cfg, k);
            const MomentSet b = moments_npc(sc.es, sc.dep, sc.cfg, k);
            CHECK(a.ex == doctest::Approx(b.ex).epsilon(1e-10));
            CHECK(a.ex2 == doctest::Approx(b.ex2).epsilon(1e-10));
            CHECK(a.ey == doctest::Approx(b.ey).epsilon(1e-10));
            CHECK(a.ey2 == doctest::Approx(b.ey2).epsilon(1e-10));
            CHECK(a.exy == doctest::Approx(b.exy).epsilon(1e-10));
        }
    }
}

TEST_CASE("moments_npc refuses contaminated mode") {
    const SyntheticCase sc = make_synthetic_case(2, 1, 2, 2, PilotMode::random_contaminated, 7);
    CHECK_THROWS_AS(moments_npc(sc.es, sc.dep, sc.cfg, 0), std::logic_error);
}

TEST_CASE("collocated mMIMO closed forms") {
    SystemConfig cfg;
    cfg.M = 2;
    cfg.N = 2;  // MN = 4: (MN)_2 = 20
    cfg.K = 1;
    cfg.tau_p = 1;
    Eigen::VectorXd beta(1), gamma(1);
    beta << 1.4;
    gamma << 0.9;
    const double rho = normalized_snr_uplink(cfg);
    const MomentSet ms = moments_mmimo(gamma(0), beta, gamma, cfg, 0);
    CHECK(ms.ex == doctest::Approx(20.0 * rho * 0.81).epsilon(1e-12));
    // K = 1: E[Y] = MN gamma (1 + rho (beta - gamma))
    CHECK(ms.ey == doctest::Approx(4.0 * 0.9 * (1.0 + rho * 0.5)).epsilon(1e-12));
}

TEST_CASE("moments_mmimo equals moments_npc on equal-beta inputs with MN antennas regrouped") {
    // M x N cell-free layout with identical rows == collocated MN-antenna site
    SystemConfig cfg;
    cfg.M = 6;
    cfg.N = 2;
    cfg.K = 3;
    cfg.tau_p = 3;
    cfg.collocated = true;
    Deployment dep;
    Rng rng(13);
    Eigen::VectorXd bk(cfg.K);
    for (int k = 0; k < cfg.K; ++k) bk(k) = 0.4 + 1.4 * rng.uniform01();
    dep.beta.resize(cfg.M, cfg.K);
    for (int m = 0; m < cfg.M; ++m) dep.beta.row(m) = bk.transpose();
    dep.rho_p = normalized_snr_pilot(cfg);
    dep.rho_u = normalized_snr_uplink(cfg);
    const PilotBook pb = build_pilot_book(cfg, 3);
    const EstimationStats es = estimation_stats(dep, pb, cfg);
    const Eigen::VectorXd gamma_all = es.gamma.row(0);
    for (int k = 0; k < cfg.K; ++k) {
        const MomentSet a = moments_npc(es, dep, cfg, k);
        const MomentSet b = moments_mmimo(gamma_all(k), bk, gamma_all, cfg, k);
        CHECK(a.ex == doctest::Approx(b.ex).epsilon(1e-10));
        CHECK(a.ex2 == doctest::Approx(b.ex2).epsilon(1e-10));
        CHECK(a.ey == doctest::Approx(b.ey).epsilon(1e-10));
        CHECK(a.ey2 == doctest::Approx(b.ey2).epsilon(1e-10));
        CHECK(a.exy == doctest::Approx(b.exy).epsilon(1e-10));
    }
}

TEST_CASE("X-moments are homogeneous of degree 2 and 4 in gamma_k") {
    SyntheticCase sc = make_synthetic_case(3, 2, 3, 3, PilotMode::orthogonal, 19);
    const int k = sc.cfg.K - 1;
    const MomentSet base = moments_general(sc.es, sc.dep, sc.cfg, k);
    const double c = 1.7;
    // scale gamma column k; keep beta - gamma fixed by moving beta with it
    SyntheticCase scaled = sc;
    for (int m = 0; m < sc.cfg.M; ++m) {
        const double g = sc.es.gamma(m, k);
        scaled.es.gamma(m, k) = c * g;
        scaled.dep.beta(m, k) = sc.dep.beta(m, k) + (c - 1.0) * g;
        scaled.es.nu[m](k, k) = c * g;
    }
    const MomentSet after = moments_general(scaled.es, scaled.dep, scaled.cfg, k);
    CHECK(after.ex == doctest::Approx(c * c * base.ex).epsilon(1e-10));
    CHECK(after.ex2 == doctest::Approx(std::pow(c, 4) * base.ex2).epsilon(1e-10));
}

TEST_CASE("E[Y] strictly increasing in each interferer gamma_mi") {
    SyntheticCase sc = make_synthetic_case(2, 1, 3, 3, PilotMode::orthogonal, 37);
    const int k = 0;
    const MomentSet base = moments_npc(sc.es, sc.dep, sc.cfg, k);
    for (int i = 1; i < sc.cfg.K; ++i) {
        for (int m = 0; m < sc.cfg.M; ++m) {
            SyntheticCase bumped = sc;
            bumped.es.gamma(m, i) += 1e-4;
            bumped.es.nu[m](i, i) += 1e-4;
            // hold beta - gamma fixed so only the gamma dependence acts
            bumped.dep.beta(m, i) += 1e-4;
            const MomentSet ms = moments_npc(bumped.es, bumped.dep, bumped.cfg, k);
            CHECK(ms.ey > base.ey);
        }
    }
}

TEST_CASE("hand case M=2 N=1 K=2 against the Monte-Carlo oracle") {
    const SyntheticCase sc = make_synthetic_case(2, 1, 2, 2, PilotMode::orthogonal, 41);
    const auto terms = moment_oracle(sc, 400000, 4242);
    for (const auto& t : terms) {
        INFO(t.term, " closed=", t.closed, " mc=", t.mc, " se=", t.se);
        CHECK(t.sigmas() < 3.5);
    }
}

TEST_CASE("contaminated sub-expectations match the oracle (smoke scale)") {
    const SyntheticCase sc = make_synthetic_case(3, 2, 3, 3, PilotMode::random_contaminated, 43);
    const auto terms = moment_oracle(sc, 200000, 737);
    for (const auto& t : terms) {
        INFO(t.term, " closed=", t.closed, " mc=", t.mc, " se=", t.se);
        CHECK(t.sigmas() < 4.0);
    }
}

TEST_CASE("moment set invariants hold on random cases") {
    for (std::uint64_t seed : {51, 52, 53, 54}) {
        const auto mode = seed % 2 ? PilotMode::orthogonal : PilotMode::random_contaminated;
        const SyntheticCase sc = make_synthetic_case(3, 2, 4, 4, mode, seed);
        for (int k = 0; k < sc.cfg.K; ++k) {
            const MomentSet ms = moments_general(sc.es, sc.dep, sc.cfg, k);
            CHECK(ms.ex > 0);
            CHECK(ms.ey > 0);
            CHECK(ms.ex2 >= ms.ex * ms.ex);
            CHECK(ms.ey2 >= ms.ey * ms.ey);
            CHECK(std::isfinite(ms.exy));
        }
    }
}

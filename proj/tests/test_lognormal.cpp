#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cfmimo/lognormal.hpp"
#include "cfmimo/oracle.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;

TEST_CASE("fit inverts the matching equations") {
    MomentSet ms;
    ms.ex = 1.0;
    ms.ex2 = std::exp(1.0);
    ms.ey = 1.0;
    ms.ey2 = std::exp(1.0);
    ms.exy = 1.0;  // uncorrelated
    const LogNormalParams p = fit_lognormal(ms);
    CHECK(p.mu_x == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(p.sigma_x == doctest::Approx(1.0).epsilon(1e-14));
    // E[XY] = E[X]E[Y]: sigma^2 = sigma_x^2 + sigma_y^2
    CHECK(p.sigma * p.sigma == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("degenerate sigma^2 raises with the offending value") {
    MomentSet ms;
    ms.ex = 1.0;
    ms.ex2 = std::exp(0.01);
    ms.ey = 1.0;
    ms.ey2 = std::exp(0.01);
    ms.exy = std::exp(0.5);  // strong positive correlation kills sigma^2
    try {
        fit_lognormal(ms);
        FAIL("expected DegenerateLognormalError");
    } catch (const DegenerateLognormalError& e) {
        CHECK(e.sigma_sq == doctest::Approx(0.02 - 1.0).epsilon(1e-10));
    }
}

TEST_CASE("scaling lambda by c shifts mu by ln c and keeps sigma") {
    MomentSet ms;
    ms.ex = 2.0;
    ms.ex2 = 9.0;
    ms.ey = 1.5;
    ms.ey2 = 4.0;
    ms.exy = 3.2;
    const LogNormalParams p = fit_lognormal(ms);
    const double c = 3.7;
    MomentSet scaled = ms;
    scaled.ex *= c;
    scaled.ex2 *= c * c;
    scaled.exy *= c;
    const LogNormalParams q = fit_lognormal(scaled);
    CHECK(q.mu - p.mu == doctest::Approx(std::log(c)).epsilon(1e-12));
    CHECK(q.sigma == doctest::Approx(p.sigma).epsilon(1e-12));
}

TEST_CASE("outage CDF: median, limits, monotonicity, erfc spot value") {
    LogNormalParams p;
    p.mu = 0.8;
    p.sigma = 1.3;
    CHECK(outage_lognormal(p, std::exp(p.mu)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(outage_lognormal(p, 1e-300) < 1e-12);
    CHECK(outage_lognormal(p, 1e300) > 1.0 - 1e-12);
    double prev = -1.0;
    for (double t = -40; t <= 40; t += 0.25) {
        const double v = outage_lognormal(p, std::pow(10.0, t / 10.0));
        CHECK(v >= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
    LogNormalParams std_p;
    std_p.mu = 0.0;
    std_p.sigma = 1.0;
    CHECK(outage_lognormal(std_p, std::exp(1.0)) ==
          doctest::Approx(0.841344746068543).epsilon(1e-12));
    CHECK_THROWS_AS(outage_lognormal(p, 0.0), std::invalid_argument);
}

TEST_CASE("rate: sigma -> 0 limit and bracket ordering") {
    LogNormalParams p;
    p.mu = 0.7;
    p.sigma = 0.0;
    CHECK(rate_lognormal(p) == doctest::Approx(std::log2(1.0 + std::exp(0.7))).epsilon(1e-12));

    Rng rng(1234);
    for (int i = 0; i < 100; ++i) {
        LogNormalParams g;
        g.mu = -3.0 + 8.0 * rng.uniform01();
        g.sigma = 0.02 + 1.98 * rng.uniform01();
        const double rate = rate_lognormal(g);
        const auto [lb, ub] = rate_bounds(g);
        CHECK(lb < rate);
        CHECK(rate < ub);
        CHECK(lb < ub);
    }
    LogNormalParams z;
    z.mu = 0.4;
    z.sigma = 0.0;
    const auto [lb0, ub0] = rate_bounds(z);
    CHECK(lb0 == doctest::Approx(ub0).epsilon(1e-14));
}

TEST_CASE("closed bound values at mu=0 sigma=1") {
    LogNormalParams p;
    p.mu = 0.0;
    p.sigma = 1.0;
    const auto [lb, ub] = rate_bounds(p);
    CHECK(lb == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ub == doctest::Approx(1.0 + (std::exp(0.5) - 1.0) / (2.0 * std::numbers::ln2))
                    .epsilon(1e-14));
}

TEST_CASE("two independent quadratures agree; frozen references") {
    // reference values computed with 30-digit arithmetic
    LogNormalParams a;
    a.mu = 0.0;
    a.sigma = 0.5;
    CHECK(rate_lognormal(a, 1e-10) == doctest::Approx(1.0437794762167488723).epsilon(1e-10));
    LogNormalParams b;
    b.mu = 0.3;
    b.sigma = 1.2;
    CHECK(rate_lognormal(b, 1e-10) == doctest::Approx(1.4554401309033905491).epsilon(1e-10));
    Rng rng(555);
    for (int i = 0; i < 30; ++i) {
        LogNormalParams g;
        g.mu = -2.0 + 6.0 * rng.uniform01();
        g.sigma = 0.05 + 1.8 * rng.uniform01();
        const double r1 = rate_lognormal(g, 1e-9);
        const double r2 = rate_lognormal_hermite(g);
        CHECK(std::abs(r1 - r2) <= 1e-6 * std::max(1.0, std::abs(r1)));
    }
}

TEST_CASE("rate matches a log-normal sampling oracle at 3 SE") {
    LogNormalParams p;
    p.mu = 0.0;
    p.sigma = 0.5;
    const long n = 1000000;
    Rng rng(777);
    double acc = 0.0, accsq = 0.0;
    for (long i = 0; i < n; ++i) {
        const double lam = std::exp(p.mu + p.sigma * rng.normal());
        const double v = std::log2(1.0 + lam);
        acc += v;
        accsq += v * v;
    }
    const double mean = acc / n;
    const double se = std::sqrt(std::max(0.0, accsq / n - mean * mean) / n);
    CHECK(std::abs(rate_lognormal(p) - mean) < 3.0 * se);
}

TEST_CASE("fit recomputed in extended precision agrees with the double path") {
    const SyntheticCase sc = make_synthetic_case(3, 2, 3, 3, PilotMode::orthogonal, 404);
    const auto in_d = detail::make_moment_inputs<double>(sc.es, sc.dep, sc.cfg.N);
    const auto in_l = detail::make_moment_inputs<long double>(sc.es, sc.dep, sc.cfg.N);
    for (int k = 0; k < sc.cfg.K; ++k) {
        const auto subs_d = detail::appendix_sub_expectations(in_d, k);
        const auto subs_l = detail::appendix_sub_expectations(in_l, k);
        const MomentSetT<double> ms_d = detail::assemble_moments(subs_d, in_d, k);
        const MomentSetT<long double> ms_l = detail::assemble_moments(subs_l, in_l, k);
        const auto p_d = fit_lognormal(ms_d);
        const auto p_l = fit_lognormal(ms_l);
        CHECK(std::abs(p_d.mu - static_cast<double>(p_l.mu)) < 1e-11);
        CHECK(std::abs(p_d.sigma - static_cast<double>(p_l.sigma)) < 1e-11);
        CHECK(std::abs(p_d.mu_x - static_cast<double>(p_l.mu_x)) < 1e-11);
        CHECK(std::abs(p_d.sigma_y - static_cast<double>(p_l.sigma_y)) < 1e-11);
    }
}

TEST_CASE("UaTF baseline: hand value for K=1 and monotonicity in rho_u") {
    SystemConfig cfg;
    cfg.M = 1;
    cfg.N = 2;
    cfg.K = 1;
    cfg.tau_p = 1;
    Deployment dep;
    dep.beta = Eigen::MatrixXd::Constant(1, 1, 1.5);
    dep.rho_p = 2.0;
    dep.rho_u = 1.0;
    const PilotBook pb = build_pilot_book(cfg, 1);
    const EstimationStats es = estimation_stats(dep, pb, cfg);
    const double g = es.gamma(0, 0);
    // SINR = rho N^2 g^2 / (rho N g beta + N g) = rho N g^2 / (rho g beta + g)
    const double sinr = dep.rho_u * cfg.N * g * g / (dep.rho_u * g * 1.5 + g);
    CHECK(rate_uatf(es, dep, pb, cfg, 0) == doctest::Approx(std::log2(1.0 + sinr)).epsilon(1e-12));

    double prev = 0.0;
    for (double rho : {0.2, 0.5, 1.0, 3.0, 10.0}) {
        Deployment d2 = dep;
        d2.rho_u = rho;
        const double r = rate_uatf(es, d2, pb, cfg, 0);
        CHECK(r >= prev);
        prev = r;
    }
}

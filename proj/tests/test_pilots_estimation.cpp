#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "cfmimo/estimation.hpp"
#include "cfmimo/oracle.hpp"
#include "cfmimo/rng.hpp"

using namespace cfmimo;
using Complex = std::complex<double>;

TEST_CASE("orthogonal pilot book is the canonical unitary basis") {
    SystemConfig cfg;
    cfg.M = 1;
    cfg.N = 1;
    cfg.K = 4;
    cfg.tau_p = 4;
    const PilotBook pb = build_pilot_book(cfg, 1);
    CHECK(pb.gram == Eigen::MatrixXcd::Identity(4, 4));
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(pb.phi.row(k).squaredNorm() - 1.0) < 1e-12);

    cfg.tau_p = 3;
    CHECK_THROWS_AS(build_pilot_book(cfg, 1), std::invalid_argument);
}

TEST_CASE("fully colliding one-sample pilots") {
    SystemConfig cfg;
    cfg.M = 1;
    cfg.N = 1;
    cfg.K = 2;
    cfg.tau_p = 1;
    cfg.pilot_mode = PilotMode::random_contaminated;
    const PilotBook pb = build_pilot_book(cfg, 3);
    CHECK(std::abs(pb.gram(0, 1)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random pilots: E|phi_k^H phi_i|^2 is about 1/tau_p") {
    SystemConfig cfg;
    cfg.M = 1;
    cfg.N = 1;
    cfg.K = 2;
    cfg.tau_p = 5;
    cfg.pilot_mode = PilotMode::random_contaminated;
    double acc = 0.0;
    const int reps = 4000;
    for (int s = 0; s < reps; ++s) {
        const PilotBook pb = build_pilot_book(cfg, 1000 + s);
        acc += std::norm(pb.gram(0, 1));
    }
    // variance of |g|^2 for a Beta-like overlap is below 1/tau_p^2
    CHECK(acc / reps == doctest::Approx(1.0 / cfg.tau_p).epsilon(0.1));
}

TEST_CASE("estimation stats closed cases") {
    // tau_p rho_p = 1 and beta = 1: c = 0.5, gamma = 0.5
    SystemConfig cfg;
    cfg.M = 1;
    cfg.N = 1;
    cfg.K = 1;
    cfg.tau_p = 1;
    Deployment dep;
    dep.beta = Eigen::MatrixXd::Ones(1, 1);
    dep.rho_p = 1.0;
    dep.rho_u = 1.0;
    const PilotBook pb = build_pilot_book(cfg, 1);
    const EstimationStats es = estimation_stats(dep, pb, cfg);
    CHECK(es.c(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(es.gamma(0, 0) == doctest::Approx(0.5).epsilon(1e-14));

    // perfect-CSI limit
    dep.rho_p = 1e8;
    const EstimationStats hi = estimation_stats(dep, pb, cfg);
    CHECK(hi.gamma(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gamma is monotone increasing in rho_p and bounded by beta") {
    SystemConfig cfg;
    cfg.M = 2;
    cfg.N = 1;
    cfg.K = 3;
    cfg.tau_p = 3;
    cfg.pilot_mode = PilotMode::random_contaminated;
    Deployment dep;
    Rng rng(5);
    dep.beta.resize(2, 3);
    for (int m = 0; m < 2; ++m)
        for (int k = 0; k < 3; ++k) dep.beta(m, k) = 0.25 + rng.uniform01();
    dep.rho_u = 1.0;
    const PilotBook pb = build_pilot_book(cfg, 8);
    double prev = 0.0;
    for (double rho_p : {0.1, 0.3, 1.0, 3.0, 10.0, 100.0}) {
        dep.rho_p = rho_p;
        const EstimationStats es = estimation_stats(dep, pb, cfg);
        CHECK(es.gamma(0, 0) > prev);
        prev = es.gamma(0, 0);
        CHECK(((es.gamma.array() > 0) && (es.gamma.array() < dep.beta.array())).all());
    }
}

TEST_CASE("nu tensor equals the brute-force matrix assembly") {
    const SyntheticCase sc = make_synthetic_case(2, 1, 2, 2, PilotMode::random_contaminated, 17);
    const int tau = sc.cfg.tau_p, K = sc.cfg.K;
    const double trp = sc.cfg.tau_p * sc.dep.rho_p;
    for (int m = 0; m < sc.cfg.M; ++m) {
        // C_y assembled entry by entry, independent of the library's product order
        Eigen::MatrixXcd cy = Eigen::MatrixXcd::Identity(tau, tau);
        for (int j = 0; j < K; ++j) {
            const Eigen::VectorXcd phi_j = sc.pb.phi.row(j).transpose();
            cy += trp * sc.dep.beta(m, j) * (phi_j * phi_j.adjoint());
        }
        for (int k = 0; k < K; ++k) {
            for (int i = 0; i < K; ++i) {
                const Eigen::VectorXcd phi_k = sc.pb.phi.row(k).transpose();
                const Eigen::VectorXcd phi_i = sc.pb.phi.row(i).transpose();
                const Complex want =
                    sc.es.c(m, k) * sc.es.c(m, i) * (phi_i.adjoint() * cy * phi_k)(0, 0);
                CHECK(std::abs(sc.es.nu[m](k, i) - want) < 1e-12);
            }
        }
    }
}

TEST_CASE("nu is Hermitian and collapses for orthogonal pilots") {
    const SyntheticCase orth = make_synthetic_case(3, 2, 3, 4, PilotMode::orthogonal, 23);
    for (int m = 0; m < 3; ++m) {
        CHECK((orth.es.nu[m] - orth.es.nu[m].adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(orth.es.nu[m](k, k) - Complex(orth.es.gamma(m, k), 0)) < 1e-12);
            for (int i = 0; i < 3; ++i)
                if (i != k) CHECK(std::abs(orth.es.nu[m](k, i)) < 1e-12);
        }
    }
    const SyntheticCase cont =
        make_synthetic_case(3, 2, 3, 2, PilotMode::random_contaminated, 29);
    for (int m = 0; m < 3; ++m)
        CHECK((cont.es.nu[m] - cont.es.nu[m].adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("channel pipeline: perfect estimation limit") {
    SystemConfig cfg;
    cfg.M = 2;
    cfg.N = 2;
    cfg.K = 2;
    cfg.tau_p = 2;
    Deployment dep;
    dep.beta = Eigen::MatrixXd::Constant(2, 2, 1.3);
    dep.rho_p = 1e10;
    dep.rho_u = 1.0;
    const PilotBook pb = build_pilot_book(cfg, 2);
    const EstimationStats es = estimation_stats(dep, pb, cfg);
    const ChannelRealization real = draw_channels(dep, es, pb, cfg, 33);
    CHECK((real.g - real.g_hat).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("channel pipeline moments: variance gamma, estimate/error orthogonality") {
    const SyntheticCase sc = make_synthetic_case(2, 2, 2, 2, PilotMode::random_contaminated, 31);
    const int draws = 60000;
    Rng rng(71);
    ChannelRealization real;
    double var_acc = 0.0, var_sq = 0.0;
    Complex cov_acc{0, 0};
    double cov_sq = 0.0;
    double norm_acc = 0.0, norm_sq = 0.0;
    const int m = 1, k = 0, n = 0;
    const int N = sc.cfg.N;
    for (int it = 0; it < draws; ++it) {
        draw_channels_into(real, sc.dep, sc.es, sc.pb, sc.cfg, rng);
        const Complex gh = real.g_hat(m * N + n, k);
        const Complex err = real.g(m * N + n, k) - gh;
        const double a = std::norm(gh);
        var_acc += a;
        var_sq += a * a;
        const Complex c = gh * std::conj(err);
        cov_acc += c;
        cov_sq += std::norm(c);
        const double nn = real.g_hat.col(k).segment(m * N, N).squaredNorm();
        norm_acc += nn;
        norm_sq += nn * nn;
    }
    const double gamma = sc.es.gamma(m, k);
    const double var_mean = var_acc / draws;
    const double var_se =
        std::sqrt(std::max(0.0, var_sq / draws - var_mean * var_mean) / draws);
    CHECK(std::abs(var_mean - gamma) < 3.5 * var_se);

    const double cov_se = std::sqrt(cov_sq / draws / draws);
    CHECK(std::abs(cov_acc / static_cast<double>(draws)) < 3.5 * cov_se);

    const double norm_mean = norm_acc / draws;
    const double norm_se =
        std::sqrt(std::max(0.0, norm_sq / draws - norm_mean * norm_mean) / draws);
    CHECK(std::abs(norm_mean - N * gamma) < 3.5 * norm_se);
}

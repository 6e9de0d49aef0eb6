#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cfmimo/deployment.hpp"
#include "cfmimo/pathloss.hpp"

using namespace cfmimo;

namespace {
SystemConfig table2_cfg(int M = 4, int N = 2, int K = 3) {
    SystemConfig cfg;
    cfg.M = M;
    cfg.N = N;
    cfg.K = K;
    cfg.tau_p = K;
    return cfg;  // defaults are the Table-II values
}
}  // namespace

TEST_CASE("three-slope path loss is continuous at both breakpoints") {
    const SystemConfig cfg = table2_cfg();
    for (double d : {cfg.pathloss_d0_km, cfg.pathloss_d1_km}) {
        const double below = three_slope_path_loss_db(d * (1.0 - 1e-12), cfg);
        const double above = three_slope_path_loss_db(d * (1.0 + 1e-12), cfg);
        CHECK(std::abs(below - above) < 1e-9);
    }
}

TEST_CASE("far-field slope is -35 dB per decade") {
    const SystemConfig cfg = table2_cfg();
    // both distances beyond the outer breakpoint
    CHECK(three_slope_path_loss_db(1.0, cfg) - three_slope_path_loss_db(0.1, cfg) ==
          doctest::Approx(-35.0).epsilon(1e-12));
    // d1 itself sits on the middle segment; continuity makes the decade ratio
    // to 10*d1 land on the same -35 dB
    CHECK(three_slope_path_loss_db(0.5, cfg) - three_slope_path_loss_db(0.05, cfg) ==
          doctest::Approx(-35.0).epsilon(1e-12));
}

TEST_CASE("path loss monotone non-increasing on the spot grid, finite at d = 0") {
    const SystemConfig cfg = table2_cfg();
    CHECK(std::isfinite(three_slope_path_loss_db(0.0, cfg)));
    CHECK(three_slope_path_loss_db(0.0, cfg) ==
          doctest::Approx(three_slope_path_loss_db(cfg.pathloss_d0_km, cfg)));
    double prev = three_slope_path_loss_db(0.01, cfg);
    for (double d : {0.05, 0.1, 0.5, 1.0}) {
        const double v = three_slope_path_loss_db(d, cfg);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("noise power and normalized SNR follow the link budget") {
    const SystemConfig cfg = table2_cfg();
    const double expected_noise =
        1.380649e-23 * 290.0 * cfg.bandwidth_hz * std::pow(10.0, cfg.noise_figure_db / 10.0);
    CHECK(noise_power_w(cfg) == doctest::Approx(expected_noise).epsilon(1e-14));
    CHECK(normalized_snr_uplink(cfg) == doctest::Approx(0.1 / expected_noise).epsilon(1e-14));

    // rho is invariant under a joint rescaling of powers and noise
    SystemConfig scaled = cfg;
    scaled.tx_power_pilot_w *= 2.0;
    scaled.tx_power_uplink_w *= 2.0;
    scaled.bandwidth_hz *= 2.0;  // doubles the noise power
    CHECK(normalized_snr_uplink(scaled) ==
          doctest::Approx(normalized_snr_uplink(cfg)).epsilon(1e-14));
    CHECK(normalized_snr_pilot(scaled) ==
          doctest::Approx(normalized_snr_pilot(cfg)).epsilon(1e-14));
}

TEST_CASE("deployment with shadowing disabled reproduces the path loss exactly") {
    SystemConfig cfg = table2_cfg(3, 1, 2);
    cfg.shadow_std_db = 0.0;
    const Deployment dep = generate_deployment(cfg, 42);
    for (int m = 0; m < cfg.M; ++m) {
        for (int k = 0; k < cfg.K; ++k) {
            const double d = (dep.ap_xy.row(m) - dep.ue_xy.row(k)).norm();
            const double pl = std::pow(10.0, three_slope_path_loss_db(d, cfg) / 10.0);
            CHECK(dep.beta(m, k) == doctest::Approx(pl).epsilon(1e-12));
        }
    }
}

TEST_CASE("same seed gives a bit-identical deployment") {
    const SystemConfig cfg = table2_cfg(7, 2, 4);
    const Deployment a = generate_deployment(cfg, 987654321);
    const Deployment b = generate_deployment(cfg, 987654321);
    CHECK(a.ap_xy == b.ap_xy);
    CHECK(a.ue_xy == b.ue_xy);
    CHECK(a.beta == b.beta);
    const Deployment c = generate_deployment(cfg, 987654322);
    CHECK(a.beta != c.beta);
}

TEST_CASE("deployment validates the configuration") {
    SystemConfig cfg = table2_cfg();
    cfg.M = 0;
    CHECK_THROWS_AS(generate_deployment(cfg, 1), std::invalid_argument);
    cfg = table2_cfg();
    cfg.pilot_mode = PilotMode::orthogonal;
    cfg.tau_p = cfg.K - 1;
    CHECK_THROWS_AS(generate_deployment(cfg, 1), std::invalid_argument);
}

TEST_CASE("collocated layout shares beta across APs") {
    SystemConfig cfg = table2_cfg(5, 2, 3);
    cfg.collocated = true;
    const Deployment dep = generate_deployment(cfg, 7);
    for (int m = 1; m < cfg.M; ++m) {
        CHECK(dep.ap_xy.row(m) == dep.ap_xy.row(0));
        for (int k = 0; k < cfg.K; ++k) CHECK(dep.beta(m, k) == dep.beta(0, k));
    }
}

TEST_CASE("beta entries are finite and positive with Table-II physics") {
    const SystemConfig cfg = table2_cfg(10, 1, 6);
    const Deployment dep = generate_deployment(cfg, 5);
    CHECK((dep.beta.array() > 0).all());
    CHECK(dep.beta.allFinite());
    CHECK(dep.rho_u > 0);
    CHECK(dep.rho_p > 0);
}

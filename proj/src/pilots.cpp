#include "cfmimo/pilots.hpp"

#include <stdexcept>

#include "cfmimo/rng.hpp"

namespace cfmimo {

PilotBook build_pilot_book(const SystemConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    PilotBook pb;
    pb.phi.setZero(cfg.K, cfg.tau_p);
    if (cfg.pilot_mode == PilotMode::orthogonal) {
        if (cfg.tau_p < cfg.K)
            throw std::invalid_argument("orthogonal pilots require tau_p >= K");
        for (int k = 0; k < cfg.K; ++k) pb.phi(k, k) = 1.0;
        pb.gram = Eigen::MatrixXcd::Identity(cfg.K, cfg.K);
        return pb;
    }
    Rng rng(seed);
    for (int k = 0; k < cfg.K; ++k) {
        for (int t = 0; t < cfg.tau_p; ++t) pb.phi(k, t) = rng.cnormal(1.0);
        pb.phi.row(k) /= pb.phi.row(k).norm();
    }
    pb.gram = pb.phi.conjugate() * pb.phi.transpose();
    return pb;
}

}  // namespace cfmimo

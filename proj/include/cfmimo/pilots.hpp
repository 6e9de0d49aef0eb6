#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cfmimo/types.hpp"

namespace cfmimo {

struct PilotBook {
    /// K x tau_p, row k is the unit-norm pilot phi_k (transposed).
    Eigen::MatrixXcd phi;
    /// K x K, gram(k, i) = phi_k^H phi_i. Identity by construction in
    /// orthogonal mode.
    Eigen::MatrixXcd gram;
};

/// Orthogonal mode: rows of the canonical unitary basis (requires tau_p >= K).
/// Random mode: rows drawn i.i.d. uniform on the complex unit sphere.
PilotBook build_pilot_book(const SystemConfig& cfg, std::uint64_t seed);

}  // namespace cfmimo

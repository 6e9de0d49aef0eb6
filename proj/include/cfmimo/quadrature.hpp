#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cfmimo {

struct QuadratureError : std::runtime_error {
    double achieved;
    QuadratureError(const std::string& what, double achieved_err)
        : std::runtime_error(what + " (achieved error " + std::to_string(achieved_err) + ")"),
          achieved(achieved_err) {}
};

namespace detail {

// 15-point Gauss-Kronrod pair on [-1, 1]; positive half, symmetric.
// Node table regenerated from the Stieltjes-polynomial system and checked to
// 1e-40 for polynomial exactness through degree 22 (Gauss-7 through 13).
inline constexpr double kGk15Nodes[8] = {
    0.0,
    0.2077849550078984676,
    0.40584515137739716691,
    0.58608723546769113029,
    0.74153118559939443986,
    0.86486442335976907279,
    0.94910791234275852453,
    0.99145537112081263921,
};
inline constexpr double kGk15Weights[8] = {
    0.20948214108472782801,
    0.20443294007529889241,
    0.19035057806478540991,
    0.16900472663926790283,
    0.14065325971552591875,
    0.10479001032225018384,
    0.063092092629978553291,
    0.022935322010529224964,
};
// Embedded 7-point Gauss weights for the odd-index (Gauss) nodes above.
inline constexpr double kG7Weights[4] = {
    0.41795918367346938776,
    0.38183005050511894495,
    0.2797053914892766679,
    0.12948496616886969327,
};

template <class F>
void gk15_panel(F&& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double resk = kGk15Weights[0] * f0;
    double resg = kG7Weights[0] * f0;
    for (int j = 1; j < 8; ++j) {
        const double x = h * kGk15Nodes[j];
        const double fsum = f(c - x) + f(c + x);
        resk += kGk15Weights[j] * fsum;
        if (j % 2 == 0) resg += kG7Weights[j / 2] * fsum;
    }
    kronrod = resk * h;
    err = std::abs((resk - resg) * h);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 15(7) with interval bisection. Throws
/// QuadratureError when the error budget cannot be met within max_depth.
template <class F>
double integrate_gk15(F&& f, double a, double b, double abs_tol = 1e-10, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    struct Seg {
        double a, b, tol;
        int depth;
    };
    double total = 0.0, err_tally = 0.0;
    // explicit stack; tolerance halves with each split
    std::vector<Seg> stack;
    stack.reserve(64);
    stack.push_back({a, b, abs_tol, 0});
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        double val, err;
        detail::gk15_panel(f, s.a, s.b, val, err);
        if (err <= s.tol || err <= 1e-16 * std::abs(val) || s.depth >= max_depth) {
            total += val;
            if (s.depth >= max_depth) err_tally += err;
            continue;
        }
        const double mid = 0.5 * (s.a + s.b);
        stack.push_back({s.a, mid, 0.5 * s.tol, s.depth + 1});
        stack.push_back({mid, s.b, 0.5 * s.tol, s.depth + 1});
    }
    if (err_tally > 100.0 * abs_tol)
        throw QuadratureError("integrate_gk15 failed to converge", err_tally);
    return total;
}

struct QuadRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Golub-Welsch rules (symmetric tridiagonal Jacobi matrix, Eigen solver).
QuadRule gauss_legendre(int n);  ///< weight 1 on [-1, 1]
QuadRule gauss_laguerre(int n);  ///< weight e^{-x} on [0, inf)
QuadRule gauss_hermite(int n);   ///< weight e^{-x^2} on (-inf, inf)

}  // namespace cfmimo

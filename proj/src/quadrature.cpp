#include "cfmimo/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace cfmimo {

namespace {

QuadRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    J.diagonal() = diag;
    for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = offdiag(i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
    QuadRule rule;
    rule.nodes = eig.eigenvalues();
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = eig.eigenvectors()(0, i);
        rule.weights(i) = mu0 * v0 * v0;
    }
    return rule;
}

QuadRule cached(std::map<int, QuadRule>& cache, std::mutex& mu, int n, QuadRule (*make)(int)) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make(n)).first;
    return it->second;
}

QuadRule make_legendre(int n) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd b(n - 1);
    for (int i = 1; i < n; ++i) b(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
    return golub_welsch(a, b, 2.0);
}

QuadRule make_laguerre(int n) {
    Eigen::VectorXd a(n), b(n - 1);
    for (int i = 0; i < n; ++i) a(i) = 2.0 * i + 1.0;
    for (int i = 1; i < n; ++i) b(i - 1) = static_cast<double>(i);
    return golub_welsch(a, b, 1.0);
}

QuadRule make_hermite(int n) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd b(n - 1);
    for (int i = 1; i < n; ++i) b(i - 1) = std::sqrt(0.5 * i);
    return golub_welsch(a, b, std::sqrt(std::numbers::pi));
}

}  // namespace

QuadRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, &make_legendre);
}

QuadRule gauss_laguerre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: n must be >= 1");
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, &make_laguerre);
}

QuadRule gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    static std::map<int, QuadRule> cache;
    static std::mutex mu;
    return cached(cache, mu, n, &make_hermite);
}

}  // namespace cfmimo

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace cfmimo {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent stream seed from (master, stream tag, index). Used so that
/// per-deployment work is reproducible under any thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0x2545f4914f6cdd1dULL;
    std::uint64_t b = splitmix64(s);
    s ^= index + 0x632be59bd9b4e019ULL;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ c;
}

namespace stream {
inline constexpr std::uint64_t geometry = 0x47454f4dULL;
inline constexpr std::uint64_t pilots = 0x50494c54ULL;
inline constexpr std::uint64_t channels = 0x4348414eULL;
inline constexpr std::uint64_t oracle = 0x4f52434cULL;
}  // namespace stream

/// mt19937_64 + Box-Muller. The standard fixes the engine's output exactly;
/// generating normals by hand keeps draws identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on (0, 1] (safe under log()).
    double uniform01() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Circularly-symmetric complex normal CN(0, var): real and imaginary
    /// parts are independent N(0, var/2).
    std::complex<double> cnormal(double var) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-std::log(u1) * var);
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace cfmimo

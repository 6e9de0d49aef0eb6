#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "cfmimo/estimation.hpp"
#include "cfmimo/types.hpp"

namespace cfmimo {

/// Rising factorial (a)_n = a (a+1) ... (a+n-1), (a)_0 = 1.
double pochhammer(double a, int n);

template <class Scalar>
struct MomentSetT {
    Scalar ex{}, ex2{}, ey{}, ey2{}, exy{};
};
using MomentSet = MomentSetT<double>;

/// Every named sub-expectation of the SINR decomposition
///   Y = rho_u sum_{i != k} B_k^i + A_k + rho_u C_k,  X = rho_u A_k^2.
/// Vectors are indexed by interferer position (user indices != k, ascending).
template <class Scalar>
struct SubExpectationsT {
    Scalar ea{}, ea2{}, ea3{};
    Scalar ec{}, ec2{}, eac{}, ea2c{};
    std::vector<Scalar> eb, eba, ebc, ea2b;
    Scalar esumb2{};
};
using SubExpectations = SubExpectationsT<double>;

namespace detail {

template <class T>
struct Kahan {
    T sum{}, comp{};
    void add(T v) {
        const T y = v - comp;
        const T t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

template <class Scalar>
struct MomentInputsT {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> gamma;  // M x K
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w;                   // per-AP sum_i (beta - gamma)
    std::vector<Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>> nu;
    int N = 1;
    Scalar rho_u{};
};

template <class Scalar>
MomentInputsT<Scalar> make_moment_inputs(const EstimationStats& es, const Deployment& dep,
                                         int n_antennas) {
    MomentInputsT<Scalar> in;
    in.gamma = es.gamma.template cast<Scalar>();
    in.w = (dep.beta - es.gamma).rowwise().sum().template cast<Scalar>();
    in.nu.reserve(es.nu.size());
    for (const auto& numat : es.nu)
        in.nu.push_back(numat.template cast<std::complex<Scalar>>());
    in.N = n_antennas;
    in.rho_u = static_cast<Scalar>(dep.rho_u);
    return in;
}

/// Appendix-B sub-expectations for arbitrary pilots, in full complex
/// arithmetic. Two terms deviate from the printed versions and were fixed
/// against an exact moment oracle: E[C^2] keeps the user sum inside the
/// square, and the last E[A^2 B] term carries N^3.
template <class Scalar>
SubExpectationsT<Scalar> appendix_sub_expectations(const MomentInputsT<Scalar>& in, int k) {
    using C = std::complex<Scalar>;
    const int M = static_cast<int>(in.gamma.rows());
    const int K = static_cast<int>(in.gamma.cols());
    const Scalar N = static_cast<Scalar>(in.N);
    if (k < 0 || k >= K) throw std::invalid_argument("moments: user index out of range");

    const auto gk = in.gamma.col(k);

    Kahan<Scalar> s1k, s2k, s3k, wg, w2g2, wg2, wg3;
    for (int m = 0; m < M; ++m) {
        const Scalar g = gk(m), wm = in.w(m);
        s1k.add(g);
        s2k.add(g * g);
        s3k.add(g * g * g);
        wg.add(wm * g);
        w2g2.add(wm * wm * g * g);
        wg2.add(wm * g * g);
        wg3.add(wm * g * g * g);
    }
    const Scalar s1 = s1k.sum, s2 = s2k.sum, s3 = s3k.sum;

    SubExpectationsT<Scalar> out;
    out.ea = N * s1;
    out.ea2 = N * s2 + N * N * s1 * s1;
    out.ea3 = 2 * N * s3 + 3 * N * N * s2 * s1 + N * N * N * s1 * s1 * s1;
    out.ec = N * wg.sum;
    out.ec2 = N * w2g2.sum + out.ec * out.ec;
    out.eac = N * wg2.sum + out.ea * out.ec;
    out.ea2c = 2 * N * wg3.sum + 2 * N * N * wg2.sum * s1 + out.ea2 * out.ec;

    std::vector<int> intf;
    intf.reserve(K - 1);
    for (int i = 0; i < K; ++i)
        if (i != k) intf.push_back(i);
    const int KI = static_cast<int>(intf.size());

    std::vector<C> Sv(KI), Sgv(KI), Sg2v(KI), Swgv(KI);
    std::vector<Scalar> Sggi(KI), Sg2gi(KI), Sg3gi(KI), Sgav2(KI), Sg2av2(KI),
        Swgav2(KI), Swg2gi(KI);
    for (int a = 0; a < KI; ++a) {
        const int i = intf[a];
        Kahan<C> sv, sgv, sg2v, swgv;
        Kahan<Scalar> sggi, sg2gi, sg3gi, sgav2, sg2av2, swgav2, swg2gi;
        for (int m = 0; m < M; ++m) {
            const Scalar g = gk(m), gi = in.gamma(m, i), wm = in.w(m);
            const C v = in.nu[m](k, i);
            const Scalar av2 = std::norm(v);
            sv.add(v);
            sgv.add(g * v);
            sg2v.add(g * g * v);
            swgv.add(wm * g * v);
            sggi.add(g * gi);
            sg2gi.add(g * g * gi);
            sg3gi.add(g * g * g * gi);
            sgav2.add(g * av2);
            sg2av2.add(g * g * av2);
            swgav2.add(wm * g * av2);
            swg2gi.add(wm * g * g * gi);
        }
        Sv[a] = sv.sum;
        Sgv[a] = sgv.sum;
        Sg2v[a] = sg2v.sum;
        Swgv[a] = swgv.sum;
        Sggi[a] = sggi.sum;
        Sg2gi[a] = sg2gi.sum;
        Sg3gi[a] = sg3gi.sum;
        Sgav2[a] = sgav2.sum;
        Sg2av2[a] = sg2av2.sum;
        Swgav2[a] = swgav2.sum;
        Swg2gi[a] = swg2gi.sum;
    }

    out.eb.resize(KI);
    out.eba.resize(KI);
    out.ebc.resize(KI);
    out.ea2b.resize(KI);
    Scalar eb_total = 0;
    for (int a = 0; a < KI; ++a) {
        const Scalar eb = N * Sggi[a] + N * N * std::norm(Sv[a]);
        out.eb[a] = eb;
        eb_total += eb;
        out.eba[a] = N * Sg2gi[a] + N * Sgav2[a] +
                     2 * N * N * (Sgv[a] * std::conj(Sv[a])).real() + out.ea * eb;
        out.ebc[a] = N * Swg2gi[a] + N * Swgav2[a] +
                     2 * N * N * (Swgv[a] * std::conj(Sv[a])).real() + out.ec * eb;
        out.ea2b[a] = out.ea2 * eb + 4 * N * Sg2av2[a] + 2 * N * Sg3gi[a] +
                      2 * N * N * s1 * Sgav2[a] + 2 * N * N * s1 * Sg2gi[a] +
                      2 * N * N * std::norm(Sgv[a]) +
                      4 * N * N * (Sg2v[a] * std::conj(Sv[a])).real() +
                      4 * N * N * N * s1 * (Sgv[a] * std::conj(Sv[a])).real();
    }

    Kahan<Scalar> sumb2;
    for (int a = 0; a < KI; ++a) {
        for (int b = 0; b < KI; ++b) {
            const int i = intf[a], j = intf[b];
            Kahan<Scalar> p1, p2, p3;
            Kahan<C> p4, p5, p6, p7, p8, p9;
            for (int m = 0; m < M; ++m) {
                const Scalar g = gk(m), gi = in.gamma(m, i), gj = in.gamma(m, j);
                const C vi = in.nu[m](k, i), vj = in.nu[m](k, j), vij = in.nu[m](i, j);
                p1.add(g * g * gi * gj);
                p2.add(g * g * std::norm(vij));
                p3.add(g * gj * std::norm(vi));
                p4.add(g * std::conj(vi) * vj * std::conj(vij));
                p5.add(g * gi * vj);
                p6.add(g * vi * vij);
                p7.add(vi * vj);
                p8.add(g * std::conj(vij));
                p9.add(g * vij);
            }
            const C cSvi = std::conj(Sv[a]), cSvj = std::conj(Sv[b]);
            Scalar term = N * p1.sum + N * p2.sum + 2 * N * p3.sum +
                          2 * N * p4.sum.real() +
                          4 * N * N * (p5.sum * cSvj).real() +
                          4 * N * N * (p6.sum * cSvj).real() +
                          2 * N * N * N * (p7.sum * cSvi * cSvj).real() +
                          2 * N * N * N * (p8.sum * cSvi * Sv[b]).real() +
                          N * N * std::norm(p7.sum) + N * N * std::norm(p9.sum);
            sumb2.add(term);
        }
    }
    out.esumb2 = sumb2.sum + eb_total * eb_total;
    return out;
}

template <class Scalar>
MomentSetT<Scalar> assemble_moments(const SubExpectationsT<Scalar>& s,
                                    const MomentInputsT<Scalar>& in, int k) {
    const Scalar rho = in.rho_u;
    const Scalar N = static_cast<Scalar>(in.N);
    const auto gk = in.gamma.col(k);
    Kahan<Scalar> s1k, s2k, s3k, s4k;
    for (int m = 0; m < gk.size(); ++m) {
        const Scalar g = gk(m);
        s1k.add(g);
        s2k.add(g * g);
        s3k.add(g * g * g);
        s4k.add(g * g * g * g);
    }
    const Scalar s1 = s1k.sum, s2 = s2k.sum, s3 = s3k.sum, s4 = s4k.sum;

    MomentSetT<Scalar> ms;
    ms.ex = rho * N * (s2 + N * s1 * s1);
    ms.ex2 = ms.ex * ms.ex +
             rho * rho * (6 * N * s4 + 8 * N * N * s3 * s1 + 2 * N * N * s2 * s2 +
                          4 * N * N * N * s2 * s1 * s1);
    Scalar eb_sum = 0, eba_sum = 0, ebc_sum = 0, ea2b_sum = 0;
    for (size_t a = 0; a < s.eb.size(); ++a) {
        eb_sum += s.eb[a];
        eba_sum += s.eba[a];
        ebc_sum += s.ebc[a];
        ea2b_sum += s.ea2b[a];
    }
    ms.ey = rho * eb_sum + s.ea + rho * s.ec;
    ms.ey2 = rho * rho * s.esumb2 + s.ea2 + rho * rho * s.ec2 + 2 * rho * eba_sum +
             2 * rho * s.eac + 2 * rho * rho * ebc_sum;
    ms.exy = rho * rho * ea2b_sum + rho * s.ea3 + rho * rho * s.ea2c;
    return ms;
}

}  // namespace detail

/// Appendix-B sub-expectations (contaminated or orthogonal pilots).
SubExpectations sub_expectations(const EstimationStats& es, const Deployment& dep,
                                 const SystemConfig& cfg, int k);

/// E[X], E[X^2], E[Y], E[Y^2], E[XY] for user k, arbitrary pilots.
MomentSet moments_general(const EstimationStats& es, const Deployment& dep,
                          const SystemConfig& cfg, int k);

/// No-pilot-contamination moments; the nu tensor collapses to
/// nu_mi^i = gamma_mi, nu_mi^j = 0. Requires orthogonal pilot mode.
MomentSet moments_npc(const EstimationStats& es, const Deployment& dep,
                      const SystemConfig& cfg, int k);

/// Collocated-mMIMO moments (MN antennas at one site, scalar per-user
/// beta/gamma), exact Pochhammer forms.
MomentSet moments_mmimo(double gamma_k, const Eigen::VectorXd& beta_all,
                        const Eigen::VectorXd& gamma_all, const SystemConfig& cfg, int k);

}  // namespace cfmimo

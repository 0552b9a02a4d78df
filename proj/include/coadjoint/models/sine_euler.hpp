#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coadjoint/models/lp_system.hpp"
#include "coadjoint/noise.hpp"

namespace coadjoint {

// Sine-discretised Euler vorticity dynamics on su(N)*, N odd.  Fourier modes
// live on the integer lattice {-K..K}^2 \ {0}, K=(N-1)/2; each conjugate
// mode pair (m, -m) is carried as two real coordinates a_m, b_m with
// omega_m = a_m + i b_m, so reality is structural.
struct SineEulerParams {
    struct NoiseMode {
        int m1 = 0;
        int m2 = 0;
        double amp = 0.0;
    };

    int n_trunc = 3;
    std::vector<NoiseMode> noise_modes{{1, 1, 0.1}, {1, -1, 0.1}};
    std::map<std::pair<int, int>, double> init;

    int k_max() const { return (n_trunc - 1) / 2; }
    double eps() const { return 2.0 * 3.141592653589793238462643383279502884 / n_trunc; }
};

namespace detail {

inline int imod(int x, int n) { return ((x % n) + n) % n; }

// componentwise representative in [-K, K]
inline int lattice_rep(int x, int n) {
    const int k = (n - 1) / 2;
    return imod(x + k, n) - k;
}

struct SineBasis {
    int n = 0;
    int k = 0;
    double eps = 0.0;
    std::vector<std::array<int, 2>> modes;            // positive representatives, fixed order
    std::map<std::pair<int, int>, int> mode_index;    // positive mode -> position
    std::vector<CMat> hx, hy;                         // Hermitian reconstruction matrices
    std::vector<CMat> rep;                            // su(N) basis, interleaved X,Y
    std::vector<std::string> names;
    std::vector<double> mode_norm2;                   // |m|^2 per coordinate

    int dim() const { return 2 * int(modes.size()); }
};

inline bool mode_positive(int m1, int m2) { return m1 > 0 || (m1 == 0 && m2 > 0); }

inline std::shared_ptr<const SineBasis> make_sine_basis(int n) {
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("build_sine_euler: truncation N must be odd and >= 3");
    auto basis = std::make_shared<SineBasis>();
    basis->n = n;
    basis->k = (n - 1) / 2;
    basis->eps = 2.0 * 3.141592653589793238462643383279502884 / n;
    const int k = basis->k;

    for (int m1 = 0; m1 <= k; ++m1)
        for (int m2 = -k; m2 <= k; ++m2)
            if (mode_positive(m1, m2)) {
                basis->mode_index[{m1, m2}] = int(basis->modes.size());
                basis->modes.push_back({m1, m2});
            }

    // N-th roots of unity; every matrix entry is a table lookup, with the
    // exponent reduced as an integer, so the construction is exactly
    // N-periodic in both mode components.
    std::vector<Cplx> root(n);
    for (int j = 0; j < n; ++j)
        root[j] = std::polar(1.0, 2.0 * 3.141592653589793238462643383279502884 * j / n);
    auto jprime = [&](int m1, int m2) {
        CMat jm(n);
        for (int j = 0; j < n; ++j)
            jm(j, imod(j + m2, n)) = root[imod(m1 * m2 + 2 * j * m1, n)];
        return jm;
    };

    const Cplx i_unit(0.0, 1.0);
    const Cplx t_scale = i_unit / Cplx(2.0 * basis->eps, 0.0);
    for (const auto& m : basis->modes) {
        CMat jp = jprime(m[0], m[1]);
        CMat jn = jprime(-m[0], -m[1]);
        basis->hx.push_back(jp + jn);
        basis->hy.push_back(i_unit * (jp - jn));
        basis->rep.push_back(t_scale * (jp + jn));
        basis->rep.push_back((Cplx(-1.0, 0.0) / Cplx(2.0 * basis->eps, 0.0)) * (jp - jn));
        const std::string suffix = std::to_string(m[0]) + "_" + std::to_string(m[1]);
        basis->names.push_back("a_" + suffix);
        basis->names.push_back("b_" + suffix);
        basis->mode_norm2.push_back(double(m[0] * m[0] + m[1] * m[1]));
        basis->mode_norm2.push_back(double(m[0] * m[0] + m[1] * m[1]));
    }
    return basis;
}

// Bracket arithmetic over formal combinations of the scaled clock-and-shift
// generators T_r, which satisfy [T_r, T_s] = (1/eps) sin(eps r^s) T_{r+s}
// with r^s the lattice wedge r1 s2 - r2 s1 reduced mod N as an integer.
using TCombo = std::vector<std::pair<std::array<int, 2>, Cplx>>;

inline TCombo basis_t_combo(const SineBasis& b, int coord) {
    const auto m = b.modes[coord / 2];
    const std::array<int, 2> neg{-m[0], -m[1]};
    if (coord % 2 == 0) return {{m, Cplx(1.0, 0.0)}, {neg, Cplx(1.0, 0.0)}};
    return {{m, Cplx(0.0, 1.0)}, {neg, Cplx(0.0, -1.0)}};
}

inline std::vector<double> sine_structure_constants(const SineBasis& b) {
    const int dim = b.dim();
    const int n = b.n;
    std::vector<double> c(std::size_t(dim) * dim * dim, 0.0);
    auto c_at = [&](int i, int j, int k) -> double& {
        return c[(std::size_t(i) * dim + j) * dim + k];
    };
    for (int i = 0; i < dim; ++i) {
        TCombo a = basis_t_combo(b, i);
        for (int j = i + 1; j < dim; ++j) {
            TCombo bb = basis_t_combo(b, j);
            // Reality of the constants only appears after the T_t and T_{-t}
            // contributions land in the same X/Y coordinate, so accumulate
            // per coordinate before checking.
            std::vector<Cplx> coord(std::size_t(dim), Cplx(0.0, 0.0));
            for (const auto& [r, ar] : a)
                for (const auto& [s, bs] : bb) {
                    const int wedge = lattice_rep(r[0] * s[1] - r[1] * s[0], n);
                    if (wedge == 0) continue;
                    const Cplx coef = ar * bs * (std::sin(b.eps * wedge) / b.eps);
                    const int t1 = lattice_rep(r[0] + s[0], n);
                    const int t2 = lattice_rep(r[1] + s[1], n);
                    if (t1 == 0 && t2 == 0)
                        throw std::logic_error("sine bracket: zero target with nonzero wedge");
                    // T_p = (X_p - i Y_p)/2, T_{-p} = (X_p + i Y_p)/2
                    const bool pos = mode_positive(t1, t2);
                    const auto key = pos ? std::pair<int, int>{t1, t2} : std::pair<int, int>{-t1, -t2};
                    const int p = b.mode_index.at(key);
                    const Cplx half = coef * Cplx(0.5, 0.0);
                    coord[std::size_t(2 * p)] += half;
                    coord[std::size_t(2 * p + 1)] += pos ? half * Cplx(0.0, -1.0)
                                                         : half * Cplx(0.0, 1.0);
                }
            for (int target = 0; target < dim; ++target) {
                const Cplx val = coord[std::size_t(target)];
                if (std::abs(val.imag()) > 1e-13)
                    throw std::logic_error("sine bracket: non-real structure constant");
                if (val.real() == 0.0) continue;
                c_at(i, j, target) += val.real();
                c_at(j, i, target) -= val.real();
            }
        }
    }
    return c;
}

inline CMat sine_reconstruct(const SineBasis& b, const DualVector& mu) {
    CMat w(b.n);
    for (std::size_t p = 0; p < b.modes.size(); ++p) {
        if (mu[2 * p] != 0.0) w += b.hx[p] * Cplx(mu[2 * p], 0.0);
        if (mu[2 * p + 1] != 0.0) w += b.hy[p] * Cplx(mu[2 * p + 1], 0.0);
    }
    return w;
}

}  // namespace detail

// Seeded stand-in for the unrecoverable published draw: independent uniforms
// on [-0.5, 0.5) per positive mode, in coordinate order.
inline std::map<std::pair<int, int>, double> uniform_mode_init(std::uint64_t seed, int n_trunc) {
    auto basis = detail::make_sine_basis(n_trunc);
    std::map<std::pair<int, int>, double> init;
    for (std::size_t p = 0; p < basis->modes.size(); ++p) {
        std::uint64_t key = seed;
        key = detail::absorb(key, detail::tag_init);
        key = detail::absorb(key, std::uint64_t(p));
        const double u = double(detail::mix64(key + 1ull) >> 11) * 0x1.0p-53;
        init[{basis->modes[p][0], basis->modes[p][1]}] = u - 0.5;
    }
    return init;
}

inline LiePoissonSystem build_sine_euler(const SineEulerParams& p) {
    auto basis = detail::make_sine_basis(p.n_trunc);
    const int dim = basis->dim();

    LieAlgebra alg(dim, detail::sine_structure_constants(*basis), Chirality::LeftInvariant,
                   basis->names, basis->rep);

    // h(omega) = -1/2 sum_m |omega_m|^2 / |m|^2: the stream function of the
    // vorticity mode m is -omega_m / |m|^2.
    const std::vector<double> w2 = basis->mode_norm2;
    HamiltonianTerm drift;
    drift.value = [w2](const DualVector& mu) {
        double s = 0.0;
        for (std::size_t i = 0; i < w2.size(); ++i) s -= 0.5 * mu[i] * mu[i] / w2[i];
        return s;
    };
    drift.gradient = [w2](const DualVector& mu) {
        AlgebraVector g(w2.size());
        for (std::size_t i = 0; i < w2.size(); ++i) g[i] = -mu[i] / w2[i];
        return g;
    };
    drift.hessian = [w2](const DualVector&) {
        Mat h(int(w2.size()), int(w2.size()));
        for (std::size_t i = 0; i < w2.size(); ++i) h(int(i), int(i)) = -1.0 / w2[i];
        return h;
    };

    std::vector<AlgebraVector> betas;
    for (const auto& nm : p.noise_modes) {
        const int r1 = detail::lattice_rep(nm.m1, basis->n);
        const int r2 = detail::lattice_rep(nm.m2, basis->n);
        if (r1 == 0 && r2 == 0)
            throw std::invalid_argument("build_sine_euler: noise mode reduces to (0,0)");
        if (nm.amp == 0.0) continue;  // zero amplitude contributes no driver
        const auto key = detail::mode_positive(r1, r2) ? std::pair<int, int>{r1, r2}
                                                       : std::pair<int, int>{-r1, -r2};
        AlgebraVector beta(dim, 0.0);
        beta[2 * basis->mode_index.at(key)] = -nm.amp;
        betas.push_back(std::move(beta));
    }

    // Casimirs tr(W^k), k = 2..N, on the Hermitian-scaled reconstruction
    // W = sum_m omega_m J'_m, whose traces are all real.
    CasimirSet casimirs;
    for (int k = 2; k <= basis->n; ++k) {
        auto value = [basis, k](const DualVector& mu) {
            CMat w = detail::sine_reconstruct(*basis, mu);
            CMat pw = w;
            for (int t = 1; t < k; ++t) pw = pw * w;
            const Cplx tr = pw.trace();
            if (std::abs(tr.imag()) > 1e-12)
                throw std::logic_error("sine-Euler Casimir: non-real trace");
            return tr.real();
        };
        auto gradient = [basis, k](const DualVector& mu) {
            CMat w = detail::sine_reconstruct(*basis, mu);
            CMat pw = CMat::identity(basis->n);
            for (int t = 1; t < k; ++t) pw = pw * w;
            DualVector g(basis->dim(), 0.0);
            for (std::size_t p2 = 0; p2 < basis->modes.size(); ++p2) {
                Cplx tx(0.0, 0.0), ty(0.0, 0.0);
                for (int r = 0; r < basis->n; ++r)
                    for (int s = 0; s < basis->n; ++s) {
                        tx += pw(r, s) * basis->hx[p2](s, r);
                        ty += pw(r, s) * basis->hy[p2](s, r);
                    }
                g[2 * p2] = k * tx.real();
                g[2 * p2 + 1] = k * ty.real();
            }
            return g;
        };
        casimirs.push_back(Casimir{"tr_w" + std::to_string(k), std::move(value), std::move(gradient)});
    }

    DualVector mu0(dim, 0.0);
    std::vector<bool> assigned(basis->modes.size(), false);
    for (const auto& [mode, val] : p.init) {
        const int r1 = detail::lattice_rep(mode.first, basis->n);
        const int r2 = detail::lattice_rep(mode.second, basis->n);
        if (r1 == 0 && r2 == 0)
            throw std::invalid_argument("build_sine_euler: initial mode reduces to (0,0)");
        const auto key = detail::mode_positive(r1, r2) ? std::pair<int, int>{r1, r2}
                                                       : std::pair<int, int>{-r1, -r2};
        const int p2 = basis->mode_index.at(key);
        if (assigned[p2])
            throw std::invalid_argument("build_sine_euler: duplicate initial coefficient for one mode pair");
        assigned[p2] = true;
        mu0[2 * p2] = val;
    }

    SemimartingaleHamiltonian ham{std::move(drift), salt_hamiltonian(betas)};
    return LiePoissonSystem{std::move(alg), std::move(ham), std::move(casimirs), std::move(mu0)};
}

}  // namespace coadjoint

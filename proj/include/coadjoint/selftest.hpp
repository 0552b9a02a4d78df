#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "coadjoint/csv.hpp"
#include "coadjoint/integrators.hpp"
#include "coadjoint/models/heavy_top.hpp"
#include "coadjoint/models/sine_euler.hpp"
#include "coadjoint/noise.hpp"

namespace coadjoint {

struct SelfCheck {
    std::string name;
    std::string detail;
    bool pass = false;
};

namespace detail {

inline double uniform_pm1(std::uint64_t stream, std::uint64_t k, std::uint64_t i) {
    std::uint64_t key = absorb(absorb(stream, k), i);
    return double(mix64(key) >> 11) * 0x1.0p-52 - 1.0;
}

inline Vec cross(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace detail

inline double jacobi_residual(const LieAlgebra& alg) {
    const int n = alg.dim();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int m = 0; m < n; ++m) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l)
                        s += alg.c(i, j, l) * alg.c(l, k, m) + alg.c(j, k, l) * alg.c(l, i, m) +
                             alg.c(k, i, l) * alg.c(l, j, m);
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

inline LieAlgebra make_so3() {
    std::vector<double> c(27, 0.0);
    auto set = [&](int i, int j, int k, double v) { c[(std::size_t(i) * 3 + j) * 3 + k] = v; };
    set(0, 1, 2, 1.0);
    set(1, 2, 0, 1.0);
    set(2, 0, 1, 1.0);
    set(1, 0, 2, -1.0);
    set(2, 1, 0, -1.0);
    set(0, 2, 1, -1.0);
    std::vector<CMat> rep;
    for (int a = 0; a < 3; ++a) {
        CMat e(3);
        const int i = (a + 1) % 3, j = (a + 2) % 3;
        e(j, i) = Cplx(1.0, 0.0);
        e(i, j) = Cplx(-1.0, 0.0);
        rep.push_back(e);
    }
    return LieAlgebra(3, c, Chirality::LeftInvariant, {"x1", "x2", "x3"}, rep);
}

// max deviation of the generic field from the hand-coded cross-product form
// (pi x omega + chi x gamma, gamma x omega), omega = I^-1 pi
inline double heavy_top_field_residual(int n_states) {
    const LiePoissonSystem sys = build_heavy_top(HeavyTopParams{});
    const HeavyTopParams p;
    double worst = 0.0;
    for (int s = 0; s < n_states; ++s) {
        DualVector mu(6);
        for (int i = 0; i < 6; ++i) mu[i] = detail::uniform_pm1(9001, std::uint64_t(s), std::uint64_t(i));
        const Vec pi{mu[0], mu[1], mu[2]}, gamma{mu[3], mu[4], mu[5]};
        const Vec omega{pi[0] / p.inertia[0], pi[1] / p.inertia[1], pi[2] / p.inertia[2]};
        const Vec v_pi = added(detail::cross(pi, omega), detail::cross(p.chi, gamma));
        const Vec v_gamma = detail::cross(gamma, omega);
        const AlgebraVector field = lp_vector_field(sys.algebra, sys.hamiltonian.drift, mu);
        for (int i = 0; i < 3; ++i) {
            worst = std::max(worst, std::abs(field[i] - v_pi[i]));
            worst = std::max(worst, std::abs(field[3 + i] - v_gamma[i]));
        }
    }
    return worst;
}

inline double gradient_fd_residual(const HamiltonianTerm& term, const DualVector& mu, double h) {
    const AlgebraVector grad = term.gradient(mu);
    double worst = 0.0;
    DualVector probe = mu;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        probe[i] = mu[i] + h;
        const double up = term.value(probe);
        probe[i] = mu[i] - h;
        const double dn = term.value(probe);
        probe[i] = mu[i];
        worst = std::max(worst, std::abs((up - dn) / (2.0 * h) - grad[i]));
    }
    return worst;
}

inline double heavy_top_gradient_fd_residual(double h) {
    const LiePoissonSystem sys = build_heavy_top(HeavyTopParams{});
    DualVector mu(6);
    for (int i = 0; i < 6; ++i) mu[i] = detail::uniform_pm1(417, 0, std::uint64_t(i));
    return gradient_fd_residual(sys.hamiltonian.drift, mu, h);
}

// Cubic probe: central differences have a pure h^2 error term here, so the
// residual ratio between two h values exposes the decay order cleanly.
inline double cubic_probe_fd_residual(double h) {
    HamiltonianTerm cubic;
    cubic.value = [](const DualVector& mu) {
        double s = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) s += (double(i) + 1.0) * 0.1 * mu[i] * mu[i] * mu[i];
        return s;
    };
    cubic.gradient = [](const DualVector& mu) {
        AlgebraVector g(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) g[i] = 3.0 * (double(i) + 1.0) * 0.1 * mu[i] * mu[i];
        return g;
    };
    cubic.hessian = [](const DualVector& mu) { return Mat(int(mu.size()), int(mu.size())); };
    DualVector mu(6);
    for (int i = 0; i < 6; ++i) mu[i] = 0.5 + 0.1 * double(i);
    return gradient_fd_residual(cubic, mu, h);
}

inline double chord_jacobian_fd_residual() {
    const LiePoissonSystem sys = build_heavy_top(HeavyTopParams{});
    DualVector mu(6);
    for (int i = 0; i < 6; ++i) mu[i] = detail::uniform_pm1(1903, 1, std::uint64_t(i));
    const double dt = 0.01;
    const Vec dw{0.05};
    const Mat frozen = chord_jacobian(sys.algebra, sys.hamiltonian, mu, dt, dw);
    const double h = 1e-5;
    double worst = 0.0;
    AlgebraVector sigma(6, 0.0);
    for (int j = 0; j < 6; ++j) {
        sigma[j] = h;
        const AlgebraVector up = tmk_residual(sys.algebra, sys.hamiltonian, mu, sigma, dt, dw);
        sigma[j] = -h;
        const AlgebraVector dn = tmk_residual(sys.algebra, sys.hamiltonian, mu, sigma, dt, dw);
        sigma[j] = 0.0;
        for (int i = 0; i < 6; ++i)
            worst = std::max(worst, std::abs((up[i] - dn[i]) / (2.0 * h) - frozen(i, j)));
    }
    return worst;
}

// [T_r, T_s] = (1/eps) sin(eps r^s) T_{r+s} over the whole truncated lattice
inline double sine_commutator_residual(int n) {
    const auto basis = detail::make_sine_basis(n);
    const double eps = basis->eps;
    const Cplx i_unit(0.0, 1.0);
    const Cplx half(0.5, 0.0);
    auto t_of = [&](int m1, int m2) {
        const bool pos = detail::mode_positive(m1, m2);
        const auto key = pos ? std::pair<int, int>{m1, m2} : std::pair<int, int>{-m1, -m2};
        const int p = basis->mode_index.at(key);
        const CMat jp = pos ? half * (basis->hx[p] - i_unit * basis->hy[p])
                            : half * (basis->hx[p] + i_unit * basis->hy[p]);
        return (i_unit / Cplx(2.0 * eps, 0.0)) * jp;
    };
    std::vector<std::array<int, 2>> lattice;
    const int k = basis->k;
    for (int m1 = -k; m1 <= k; ++m1)
        for (int m2 = -k; m2 <= k; ++m2)
            if (m1 != 0 || m2 != 0) lattice.push_back({m1, m2});
    double worst = 0.0;
    for (const auto& r : lattice)
        for (const auto& s : lattice) {
            CMat lhs = commutator(t_of(r[0], r[1]), t_of(s[0], s[1]));
            const int wedge = detail::lattice_rep(r[0] * s[1] - r[1] * s[0], n);
            const int t1 = detail::lattice_rep(r[0] + s[0], n);
            const int t2 = detail::lattice_rep(r[1] + s[1], n);
            if (t1 != 0 || t2 != 0)
                lhs -= Cplx(std::sin(eps * wedge) / eps, 0.0) * t_of(t1, t2);
            worst = std::max(worst, lhs.max_abs());
        }
    return worst;
}

inline std::vector<SelfCheck> run_selftests() {
    std::vector<SelfCheck> checks;
    auto residual_check = [&](const std::string& name, double resid, double tol) {
        checks.push_back({name, "residual " + format_double(resid) + ", tol " + format_double(tol),
                          resid <= tol});
    };

    residual_check("jacobi identity so(3)", jacobi_residual(make_so3()), 1e-12);
    residual_check("jacobi identity se(3)",
                   jacobi_residual(build_heavy_top(HeavyTopParams{}).algebra), 1e-12);
    {
        SineEulerParams p3;
        residual_check("jacobi identity su(3)", jacobi_residual(build_sine_euler(p3).algebra), 1e-12);
        SineEulerParams p5;
        p5.n_trunc = 5;
        residual_check("jacobi identity su(5)", jacobi_residual(build_sine_euler(p5).algebra), 1e-12);
    }
    residual_check("sine bracket commutator oracle N=3", sine_commutator_residual(3), 1e-12);
    residual_check("sine bracket commutator oracle N=5", sine_commutator_residual(5), 1e-12);
    residual_check("heavy-top field matches cross-product form (1000 states)",
                   heavy_top_field_residual(1000), 1e-14);
    residual_check("heavy-top gradient vs central differences", heavy_top_gradient_fd_residual(1e-4),
                   1e-9);
    {
        const double coarse = cubic_probe_fd_residual(1e-3);
        const double fine = cubic_probe_fd_residual(1e-4);
        const double ratio = coarse / fine;
        checks.push_back({"gradient finite differences decay second order",
                          "error ratio " + format_double(ratio) + " for h 1e-3 vs 1e-4",
                          ratio > 50.0 && ratio < 200.0});
    }
    residual_check("chord jacobian vs finite differences", chord_jacobian_fd_residual(), 1e-6);
    return checks;
}

}  // namespace coadjoint

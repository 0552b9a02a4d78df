#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "coadjoint/models/lp_system.hpp"

namespace coadjoint {

// Stochastic heavy top on se(3)*: state (pi, gamma), diagonal inertia, gravity
// axis chi, and one linear noise Hamiltonian coupling alpha to pi.
struct HeavyTopParams {
    Vec inertia{4.0, 4.0, 1.0};
    Vec chi{0.0, 0.0, 1.0};
    Vec alpha{0.01, 0.02, 0.03};
    Vec pi0{-std::sqrt(0.5), std::sqrt(0.5), 0.0};
    Vec gamma0{-std::sqrt(0.5), std::sqrt(0.5), 0.0};
};

namespace detail {

inline CMat se3_rotation_basis(int axis) {
    // hat map embedded in the top-left 3x3 block of a 4x4 matrix
    CMat e(4);
    const int i = (axis + 1) % 3, j = (axis + 2) % 3;
    e(j, i) = 1.0;
    e(i, j) = -1.0;
    return e;
}

inline CMat se3_translation_basis(int axis) {
    CMat e(4);
    e(axis, 3) = 1.0;
    return e;
}

}  // namespace detail

// The 6-dimensional se(3) algebra with structure constants taken from the
// 4x4 matrix representation, so transcription-sign bugs cannot arise; the
// drift field is pinned to the classical equations of motion
// d(pi)    = (pi x omega + chi x gamma) dt + pi x alpha o dW
// d(gamma) = (gamma x omega) dt + gamma x alpha o dW,   omega = I^{-1} pi,
// by tests comparing against hand-coded cross products.
inline LiePoissonSystem build_heavy_top(const HeavyTopParams& p) {
    if (p.inertia.size() != 3 || p.chi.size() != 3 || p.alpha.size() != 3 || p.pi0.size() != 3 ||
        p.gamma0.size() != 3)
        throw std::invalid_argument("build_heavy_top: all parameter vectors must have length 3");
    for (double v : p.inertia)
        if (!(v > 0.0)) throw std::invalid_argument("build_heavy_top: inertia entries must be positive");

    std::vector<CMat> basis;
    for (int i = 0; i < 3; ++i) basis.push_back(detail::se3_rotation_basis(i));
    for (int i = 0; i < 3; ++i) basis.push_back(detail::se3_translation_basis(i));
    LieAlgebra alg = algebra_from_basis(
        basis, Chirality::LeftInvariant,
        {"pi1", "pi2", "pi3", "gamma1", "gamma2", "gamma3"});

    const Vec inertia = p.inertia;
    const Vec chi = p.chi;

    HamiltonianTerm drift;
    drift.value = [inertia, chi](const DualVector& mu) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += 0.5 * mu[i] * mu[i] / inertia[i] - chi[i] * mu[3 + i];
        return s;
    };
    drift.gradient = [inertia, chi](const DualVector& mu) {
        AlgebraVector g(6);
        for (int i = 0; i < 3; ++i) {
            g[i] = mu[i] / inertia[i];
            g[3 + i] = -chi[i];
        }
        return g;
    };
    drift.hessian = [inertia](const DualVector&) {
        Mat h(6, 6);
        for (int i = 0; i < 3; ++i) h(i, i) = 1.0 / inertia[i];
        return h;
    };

    // zero amplitude means no driver at all, so deterministic setups carry
    // no phantom noise dimension
    std::vector<AlgebraVector> betas;
    if (p.alpha[0] != 0.0 || p.alpha[1] != 0.0 || p.alpha[2] != 0.0) {
        AlgebraVector beta(6, 0.0);
        for (int i = 0; i < 3; ++i) beta[i] = p.alpha[i];
        betas.push_back(std::move(beta));
    }

    CasimirSet casimirs;
    casimirs.push_back(Casimir{
        "pi_dot_gamma",
        [](const DualVector& mu) {
            return mu[0] * mu[3] + mu[1] * mu[4] + mu[2] * mu[5];
        },
        [](const DualVector& mu) {
            return DualVector{mu[3], mu[4], mu[5], mu[0], mu[1], mu[2]};
        }});
    casimirs.push_back(Casimir{
        "gamma_norm2",
        [](const DualVector& mu) {
            return mu[3] * mu[3] + mu[4] * mu[4] + mu[5] * mu[5];
        },
        [](const DualVector& mu) {
            return DualVector{0.0, 0.0, 0.0, 2.0 * mu[3], 2.0 * mu[4], 2.0 * mu[5]};
        }});

    DualVector mu0(6);
    for (int i = 0; i < 3; ++i) {
        mu0[i] = p.pi0[i];
        mu0[3 + i] = p.gamma0[i];
    }

    SemimartingaleHamiltonian ham{std::move(drift), salt_hamiltonian(betas)};
    return LiePoissonSystem{std::move(alg), std::move(ham), std::move(casimirs), std::move(mu0)};
}

}  // namespace coadjoint

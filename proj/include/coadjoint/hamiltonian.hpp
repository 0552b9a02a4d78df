#pragma once

#include <functional>
#include <vector>

#include "coadjoint/lie_algebra.hpp"

namespace coadjoint {

// One Hamiltonian term: value, variational derivative (an algebra element),
// and Hessian.  Gradients and Hessians are closed-form; finite-difference
// consistency lives in the test suite, not at runtime.
struct HamiltonianTerm {
    std::function<double(const DualVector&)> value;
    std::function<AlgebraVector(const DualVector&)> gradient;
    std::function<Mat(const DualVector&)> hessian;
};

// Drift Hamiltonian plus M diffusion Hamiltonians, one per Wiener driver.
struct SemimartingaleHamiltonian {
    HamiltonianTerm drift;
    std::vector<HamiltonianTerm> diffusions;

    int num_drivers() const { return int(diffusions.size()); }
};

// Linear noise Hamiltonians h_i(mu) = <beta_i, mu>: constant gradient, zero Hessian.
inline std::vector<HamiltonianTerm> salt_hamiltonian(const std::vector<AlgebraVector>& beta) {
    std::vector<HamiltonianTerm> terms;
    terms.reserve(beta.size());
    for (const AlgebraVector& b : beta) {
        const int n = int(b.size());
        HamiltonianTerm t;
        t.value = [b](const DualVector& mu) { return dot(b, mu); };
        t.gradient = [b](const DualVector& mu) {
            if (mu.size() != b.size())
                throw std::invalid_argument("salt_hamiltonian: coordinate length mismatch");
            return b;
        };
        t.hessian = [n](const DualVector& mu) {
            if (mu.size() != std::size_t(n))
                throw std::invalid_argument("salt_hamiltonian: coordinate length mismatch");
            return Mat(n, n);
        };
        terms.push_back(std::move(t));
    }
    return terms;
}

// The Lie-Poisson vector field of one term: -J(mu) grad(mu) for a left-invariant
// algebra, +J(mu) grad(mu) for a right-invariant one.
inline DualVector lp_vector_field(const LieAlgebra& alg, const HamiltonianTerm& term,
                                  const DualVector& mu) {
    check_dim(alg, mu, "lp_vector_field");
    AlgebraVector g = term.gradient(mu);
    check_dim(alg, g, "lp_vector_field gradient");
    DualVector f = ad_star(alg, g, mu);
    if (alg.chirality() == Chirality::RightInvariant)
        for (double& x : f) x = -x;
    return f;
}

// Jacobian of lp_vector_field at mu: d/dmu [s ad*_{grad} mu]
//   = s (ad_star_matrix(grad) - J(mu) H(mu)),   s = +1 left, -1 right.
inline Mat lp_vector_field_jacobian(const LieAlgebra& alg, const HamiltonianTerm& term,
                                    const DualVector& mu) {
    check_dim(alg, mu, "lp_vector_field_jacobian");
    AlgebraVector g = term.gradient(mu);
    Mat jac = ad_star_matrix(alg, g) - j_matrix(alg, mu) * term.hessian(mu);
    if (alg.chirality() == Chirality::RightInvariant) jac *= -1.0;
    return jac;
}

}  // namespace coadjoint

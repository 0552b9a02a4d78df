#pragma once

#include <string>
#include <utility>
#include <vector>

#include "coadjoint/linalg.hpp"

namespace coadjoint {

// Coordinates of an algebra element (sigma = sum sigma^i e_i) and of a dual
// element (mu = sum mu_i eps^i).  The pairing <mu, sigma> is the coordinate
// dot product in the induced dual basis.
using AlgebraVector = Vec;
using DualVector = Vec;

enum class Chirality { LeftInvariant, RightInvariant };
enum class DexpSide { Plus, Minus };

// Finite-dimensional real Lie algebra given by dense structure constants
// C[i][j][k], meaning [e_i, e_j] = sum_k C[i][j][k] e_k.  An optional matrix
// representation of the basis enables trace Casimirs and pairing oracles.
class LieAlgebra {
  public:
    LieAlgebra(int dim, std::vector<double> structure_constants, Chirality chirality,
               std::vector<std::string> coord_names = {}, std::vector<CMat> rep = {})
        : dim_(dim),
          c_(std::move(structure_constants)),
          chirality_(chirality),
          coord_names_(std::move(coord_names)),
          rep_(std::move(rep)) {
        if (dim <= 0) throw std::invalid_argument("LieAlgebra: dim must be positive");
        if (c_.size() != std::size_t(dim) * dim * dim)
            throw std::invalid_argument("LieAlgebra: structure constant array has wrong size");
        if (coord_names_.empty()) {
            for (int i = 0; i < dim; ++i) coord_names_.push_back("x" + std::to_string(i + 1));
        }
        if (coord_names_.size() != std::size_t(dim))
            throw std::invalid_argument("LieAlgebra: coordinate name count mismatch");
        if (!rep_.empty() && rep_.size() != std::size_t(dim))
            throw std::invalid_argument("LieAlgebra: representation must cover the basis");
        validate();
    }

    int dim() const { return dim_; }
    Chirality chirality() const { return chirality_; }
    const std::vector<std::string>& coord_names() const { return coord_names_; }
    bool has_rep() const { return !rep_.empty(); }
    const std::vector<CMat>& rep() const { return rep_; }

    double c(int i, int j, int k) const { return c_[(std::size_t(i) * dim_ + j) * dim_ + k]; }

    CMat rep_of(const AlgebraVector& v) const {
        if (rep_.empty()) throw std::logic_error("LieAlgebra: no representation registered");
        CMat m(rep_[0].size());
        for (int i = 0; i < dim_; ++i) m += rep_[i] * Cplx(v[i], 0.0);
        return m;
    }

  private:
    // Antisymmetry and Jacobi are structural; a registered representation
    // must realize the same bracket.  Tolerances 1e-12 absolute.
    void validate() const {
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                for (int k = 0; k < dim_; ++k)
                    if (std::abs(c(i, j, k) + c(j, i, k)) > 1e-12)
                        throw std::invalid_argument("LieAlgebra: structure constants not antisymmetric");
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                for (int k = 0; k < dim_; ++k)
                    for (int l = 0; l < dim_; ++l) {
                        double s = 0.0;
                        for (int m = 0; m < dim_; ++m)
                            s += c(i, j, m) * c(m, k, l) + c(j, k, m) * c(m, i, l) +
                                 c(k, i, m) * c(m, j, l);
                        if (std::abs(s) > 1e-12)
                            throw std::invalid_argument("LieAlgebra: Jacobi identity fails");
                    }
        if (!rep_.empty()) {
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j) {
                    CMat lhs = commutator(rep_[i], rep_[j]);
                    for (int k = 0; k < dim_; ++k) lhs -= rep_[k] * Cplx(c(i, j, k), 0.0);
                    if (lhs.max_abs() > 1e-12)
                        throw std::invalid_argument("LieAlgebra: representation does not match bracket");
                }
        }
    }

    int dim_;
    std::vector<double> c_;
    Chirality chirality_;
    std::vector<std::string> coord_names_;
    std::vector<CMat> rep_;
};

inline void check_dim(const LieAlgebra& alg, const Vec& v, const char* what) {
    if (v.size() != std::size_t(alg.dim()))
        throw std::invalid_argument(std::string(what) + ": coordinate length does not match algebra dim");
}

// [sigma, v]^k = sum_ij C_ij^k sigma^i v^j
inline AlgebraVector ad(const LieAlgebra& alg, const AlgebraVector& sigma, const AlgebraVector& v) {
    check_dim(alg, sigma, "ad");
    check_dim(alg, v, "ad");
    const int n = alg.dim();
    AlgebraVector out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (sigma[i] == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            if (v[j] == 0.0) continue;
            const double f = sigma[i] * v[j];
            for (int k = 0; k < n; ++k) out[k] += alg.c(i, j, k) * f;
        }
    }
    return out;
}

// J(mu)[i][j] = sum_k C_ij^k mu_k; antisymmetric by construction.
inline Mat j_matrix(const LieAlgebra& alg, const DualVector& mu) {
    check_dim(alg, mu, "j_matrix");
    const int n = alg.dim();
    Mat j(n, n);
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += alg.c(i, jj, k) * mu[k];
            j(i, jj) = s;
        }
    return j;
}

// ad*_sigma mu = -J(mu) sigma
inline DualVector ad_star(const LieAlgebra& alg, const AlgebraVector& sigma, const DualVector& mu) {
    check_dim(alg, sigma, "ad_star");
    check_dim(alg, mu, "ad_star");
    const int n = alg.dim();
    DualVector out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) s -= alg.c(i, j, k) * mu[k] * sigma[j];
        out[i] = s;
    }
    return out;
}

// Matrix S of the linear map nu -> ad*_sigma nu, so S[i][k] = -sum_j C_ij^k sigma^j.
inline Mat ad_star_matrix(const LieAlgebra& alg, const AlgebraVector& sigma) {
    check_dim(alg, sigma, "ad_star_matrix");
    const int n = alg.dim();
    Mat s(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            double v = 0.0;
            for (int j = 0; j < n; ++j) v -= alg.c(i, j, k) * sigma[j];
            s(i, k) = v;
        }
    return s;
}

// Transports mu along the coadjoint orbit by the group element exp(sigma);
// every Casimir is invariant under this map up to exponential round-off.
// LeftInvariant moves with exp(+ad*_sigma), RightInvariant with exp(-ad*_sigma),
// matching the sign of the corresponding Lie-Poisson flow.
inline DualVector coadjoint_move(const LieAlgebra& alg, const AlgebraVector& sigma,
                                 const DualVector& mu) {
    check_dim(alg, sigma, "coadjoint_move");
    check_dim(alg, mu, "coadjoint_move");
    Mat s = ad_star_matrix(alg, sigma);
    if (alg.chirality() == Chirality::RightInvariant) s *= -1.0;
    return matrix_exp(s) * mu;
}

// Truncated inverse-differential of exp via iterated right bracketing:
// v + B1 [v,sigma] + (1/12)[[v,sigma],sigma] + ..., B1 = +1/2 (Plus) or -1/2 (Minus).
// Order 0 is the identity operator.
inline AlgebraVector dexpinv(const LieAlgebra& alg, const AlgebraVector& sigma,
                             const AlgebraVector& v, int order, DexpSide side) {
    check_dim(alg, sigma, "dexpinv");
    check_dim(alg, v, "dexpinv");
    if (order < 0) throw std::invalid_argument("dexpinv: order must be nonnegative");
    if (order > 6) throw std::invalid_argument("dexpinv: truncation order above 6 not implemented");
    static const double even_coef[7] = {1.0, 0.0, 1.0 / 12.0, 0.0, -1.0 / 720.0, 0.0, 1.0 / 30240.0};
    AlgebraVector out = v;
    AlgebraVector w = v;
    for (int k = 1; k <= order; ++k) {
        w = ad(alg, w, sigma);
        double coef = (k == 1) ? (side == DexpSide::Plus ? 0.5 : -0.5) : even_coef[k];
        if (coef != 0.0) axpy(coef, w, out);
    }
    return out;
}

// Structure constants from a faithful matrix basis: solves the Gram system
// <e_k, e_l> c = <e_k, [e_i, e_j]> under the real Frobenius pairing.
inline LieAlgebra algebra_from_basis(const std::vector<CMat>& basis, Chirality chirality,
                                     std::vector<std::string> coord_names = {}) {
    const int n = int(basis.size());
    if (n == 0) throw std::invalid_argument("algebra_from_basis: empty basis");
    Mat gram(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) gram(k, l) = frobenius_re(basis[k], basis[l]);
    LuFactor lu(gram);
    if (lu.singular())
        throw std::invalid_argument("algebra_from_basis: basis is not linearly independent");
    std::vector<double> c(std::size_t(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            CMat br = commutator(basis[i], basis[j]);
            Vec rhs(n);
            for (int k = 0; k < n; ++k) rhs[k] = frobenius_re(basis[k], br);
            Vec coef = lu.solve(rhs);
            for (int k = 0; k < n; ++k) c[(std::size_t(i) * n + j) * n + k] = coef[k];
        }
    return LieAlgebra(n, std::move(c), chirality, std::move(coord_names), basis);
}

}  // namespace coadjoint

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coadjoint/casimir.hpp"
#include "coadjoint/hamiltonian.hpp"
#include "coadjoint/lie_algebra.hpp"
#include "coadjoint/linalg.hpp"
#include "coadjoint/noise.hpp"
#include "coadjoint/trajectory.hpp"

namespace coadjoint {

enum class Method { Tmk, DirectIm, DirectTrap, EulerMaruyamaMk, DeterministicRkmk };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::Tmk: return "tmk";
        case Method::DirectIm: return "direct_im";
        case Method::DirectTrap: return "direct_trap";
        case Method::EulerMaruyamaMk: return "em_mk";
        case Method::DeterministicRkmk: return "rkmk";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "tmk") return Method::Tmk;
    if (s == "direct_im") return Method::DirectIm;
    if (s == "direct_trap") return Method::DirectTrap;
    if (s == "em_mk") return Method::EulerMaruyamaMk;
    if (s == "rkmk") return Method::DeterministicRkmk;
    throw std::invalid_argument("unknown method '" + s +
                                "' (expected tmk, direct_im, direct_trap, em_mk, or rkmk)");
}

struct ButcherTableau {
    Mat a;
    Vec b;
    Vec c;

    int stages() const { return int(b.size()); }

    bool is_explicit() const {
        for (int i = 0; i < stages(); ++i)
            for (int j = i; j < stages(); ++j)
                if (a(i, j) != 0.0) return false;
        return true;
    }
};

inline ButcherTableau rk4_tableau() {
    ButcherTableau t;
    t.a = Mat(4, 4);
    t.a(1, 0) = 0.5;
    t.a(2, 1) = 0.5;
    t.a(3, 2) = 1.0;
    t.b = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
    t.c = {0.0, 0.5, 0.5, 1.0};
    return t;
}

inline ButcherTableau lie_euler_tableau() {
    ButcherTableau t;
    t.a = Mat(1, 1);
    t.b = {1.0};
    t.c = {0.0};
    return t;
}

struct StepperConfig {
    Method method = Method::Tmk;
    double chord_tol = 1e-13;   // sup-norm bound on the residual
    int chord_max_iter = 100;
    int dexpinv_order = 2;      // pairs with the fourth-order tableau; stochastic steppers ignore it
    ButcherTableau rk_tableau = rk4_tableau();

    void validate() const {
        if (!(chord_tol > 0.0)) throw std::invalid_argument("StepperConfig: chord_tol must be positive");
        if (chord_max_iter < 1) throw std::invalid_argument("StepperConfig: chord_max_iter must be >= 1");
        if (dexpinv_order < 0) throw std::invalid_argument("StepperConfig: dexpinv_order must be >= 0");
    }
};

// Raised when a single step cannot complete; integrate() stamps the step index.
class StepError : public std::runtime_error {
  public:
    StepError(const std::string& what, double residual, int iters)
        : std::runtime_error(what), residual(residual), iters(iters) {}

    double residual;
    int iters;
    std::int64_t step_index = -1;
};

inline void check_drivers(const SemimartingaleHamiltonian& ham, const Vec& dw, const char* what) {
    if (dw.size() != std::size_t(ham.num_drivers()))
        throw std::invalid_argument(std::string(what) + ": increment count does not match driver count");
}

// f(sigma) = sigma - dt grad_h(mu_bar) - sum_i dW^i grad_h_i(mu_bar),
// mu_bar = (mu_n + coadjoint_move(sigma, mu_n)) / 2.
inline AlgebraVector tmk_residual(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                                  const DualVector& mu_n, const AlgebraVector& sigma, double dt,
                                  const Vec& dw) {
    check_dim(alg, mu_n, "tmk_residual");
    check_dim(alg, sigma, "tmk_residual");
    check_drivers(ham, dw, "tmk_residual");
    DualVector mu_bar = coadjoint_move(alg, sigma, mu_n);
    for (int i = 0; i < alg.dim(); ++i) mu_bar[i] = 0.5 * mu_n[i] + 0.5 * mu_bar[i];
    AlgebraVector f = sigma;
    axpy(-dt, ham.drift.gradient(mu_bar), f);
    for (std::size_t i = 0; i < dw.size(); ++i)
        if (dw[i] != 0.0) axpy(-dw[i], ham.diffusions[i].gradient(mu_bar), f);
    return f;
}

// Frozen chord Jacobian Df(0) = I + s (dt/2) H(mu_n) J(mu_n) + s sum_i (dW^i/2) H_i(mu_n) J(mu_n),
// s = +1 left-invariant, -1 right-invariant.  SALT diffusions contribute nothing.
inline Mat chord_jacobian(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                          const DualVector& mu_n, double dt, const Vec& dw) {
    check_dim(alg, mu_n, "chord_jacobian");
    check_drivers(ham, dw, "chord_jacobian");
    const int n = alg.dim();
    const double s = alg.chirality() == Chirality::LeftInvariant ? 1.0 : -1.0;
    Mat j = j_matrix(alg, mu_n);
    Mat df = Mat::identity(n);
    df += (s * 0.5 * dt) * (ham.drift.hessian(mu_n) * j);
    for (std::size_t i = 0; i < dw.size(); ++i) {
        if (dw[i] == 0.0) continue;
        Mat h = ham.diffusions[i].hessian(mu_n);
        if (h.max_abs() == 0.0) continue;
        df += (s * 0.5 * dw[i]) * (h * j);
    }
    return df;
}

namespace detail {

struct ChordOutcome {
    Vec root;
    int iters = 0;
    double residual = 0.0;
};

// sigma^{k+1} = sigma^k - Df(0)^{-1} f(sigma^k); Df(0) factored once.
// Non-convergence raises, never silently accepts.
template <class ResidualFn>
ChordOutcome chord_solve(const Mat& frozen_jacobian, ResidualFn&& f, Vec start,
                         const StepperConfig& cfg, const char* ctx) {
    if (!frozen_jacobian.is_finite())
        throw StepError(std::string(ctx) + ": chord Jacobian has non-finite entries", 0.0, 0);
    LuFactor lu(frozen_jacobian);
    if (lu.singular())
        throw StepError(std::string(ctx) + ": chord Jacobian singular (pivot ratio " +
                            std::to_string(lu.pivot_ratio()) + ")",
                        0.0, 0);
    Vec x = std::move(start);
    Vec fx = f(x);
    double r = norm_inf(fx);
    int it = 0;
    for (;;) {
        if (!std::isfinite(r))
            throw StepError(std::string(ctx) + ": chord residual non-finite", r, it);
        if (r <= cfg.chord_tol) break;
        if (it >= cfg.chord_max_iter)
            throw StepError(std::string(ctx) + ": chord did not converge within " +
                                std::to_string(cfg.chord_max_iter) + " iterations (residual " +
                                std::to_string(r) + ")",
                            r, it);
        Vec d = lu.solve(fx);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= d[i];
        fx = f(x);
        r = norm_inf(fx);
        ++it;
    }
    return {std::move(x), it, r};
}

}  // namespace detail

// Trapezoidal Munthe-Kaas step: chord-solve for sigma, then move mu_n along
// the coadjoint orbit.  Casimirs of the result match mu_n up to exponential
// round-off regardless of how tightly the chord converged.
inline StepRecord tmk_step(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                           const DualVector& mu_n, double dt, const Vec& dw,
                           const StepperConfig& cfg) {
    cfg.validate();
    if (cfg.method != Method::Tmk) throw std::invalid_argument("tmk_step: config selects another method");
    Mat df = chord_jacobian(alg, ham, mu_n, dt, dw);
    auto res = [&](const Vec& sigma) { return tmk_residual(alg, ham, mu_n, sigma, dt, dw); };
    detail::ChordOutcome out =
        detail::chord_solve(df, res, Vec(alg.dim(), 0.0), cfg, "tmk_step");
    StepRecord rec;
    rec.state = coadjoint_move(alg, out.root, mu_n);
    rec.sigma = std::move(out.root);
    rec.chord_iters = out.iters;
    rec.residual_norm = out.residual;
    return rec;
}

namespace detail {

inline DualVector combined_field(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                                 double dt, const Vec& dw, const DualVector& mu) {
    DualVector g = lp_vector_field(alg, ham.drift, mu);
    for (double& x : g) x *= dt;
    for (std::size_t i = 0; i < dw.size(); ++i)
        if (dw[i] != 0.0) axpy(dw[i], lp_vector_field(alg, ham.diffusions[i], mu), g);
    return g;
}

inline Mat combined_field_jacobian(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                                   double dt, const Vec& dw, const DualVector& mu) {
    Mat jac = lp_vector_field_jacobian(alg, ham.drift, mu);
    jac *= dt;
    for (std::size_t i = 0; i < dw.size(); ++i) {
        if (dw[i] == 0.0) continue;
        jac += dw[i] * lp_vector_field_jacobian(alg, ham.diffusions[i], mu);
    }
    return jac;
}

}  // namespace detail

// Implicit midpoint applied directly to the Lie-Poisson equations on the dual:
// x = mu_n + G((mu_n + x)/2).  Baseline; preserves Casimirs only approximately.
inline StepRecord direct_im_step(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                                 const DualVector& mu_n, double dt, const Vec& dw,
                                 const StepperConfig& cfg) {
    cfg.validate();
    if (cfg.method != Method::DirectIm)
        throw std::invalid_argument("direct_im_step: config selects another method");
    check_dim(alg, mu_n, "direct_im_step");
    check_drivers(ham, dw, "direct_im_step");
    const int n = alg.dim();
    Mat df = Mat::identity(n);
    df -= 0.5 * detail::combined_field_jacobian(alg, ham, dt, dw, mu_n);
    auto res = [&](const Vec& x) {
        DualVector mid(n);
        for (int i = 0; i < n; ++i) mid[i] = 0.5 * (mu_n[i] + x[i]);
        DualVector g = detail::combined_field(alg, ham, dt, dw, mid);
        Vec f(n);
        for (int i = 0; i < n; ++i) f[i] = x[i] - mu_n[i] - g[i];
        return f;
    };
    detail::ChordOutcome out = detail::chord_solve(df, res, mu_n, cfg, "direct_im_step");
    StepRecord rec;
    rec.state = std::move(out.root);
    rec.chord_iters = out.iters;
    rec.residual_norm = out.residual;
    return rec;
}

// Trapezoidal rule applied directly on the dual: x = mu_n + (G(mu_n) + G(x))/2.
// Shares the frozen Jacobian with the midpoint baseline.
inline StepRecord direct_trap_step(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                                   const DualVector& mu_n, double dt, const Vec& dw,
                                   const StepperConfig& cfg) {
    cfg.validate();
    if (cfg.method != Method::DirectTrap)
        throw std::invalid_argument("direct_trap_step: config selects another method");
    check_dim(alg, mu_n, "direct_trap_step");
    check_drivers(ham, dw, "direct_trap_step");
    const int n = alg.dim();
    Mat df = Mat::identity(n);
    df -= 0.5 * detail::combined_field_jacobian(alg, ham, dt, dw, mu_n);
    const DualVector g0 = detail::combined_field(alg, ham, dt, dw, mu_n);
    auto res = [&](const Vec& x) {
        DualVector g = detail::combined_field(alg, ham, dt, dw, x);
        Vec f(n);
        for (int i = 0; i < n; ++i) f[i] = x[i] - mu_n[i] - 0.5 * (g0[i] + g[i]);
        return f;
    };
    detail::ChordOutcome out = detail::chord_solve(df, res, mu_n, cfg, "direct_trap_step");
    StepRecord rec;
    rec.state = std::move(out.root);
    rec.chord_iters = out.iters;
    rec.residual_norm = out.residual;
    return rec;
}

// Explicit Euler-Maruyama on the algebra followed by the orbit move; Casimir-exact,
// strong order 1 under linear (SALT) noise.
inline StepRecord em_mk_step(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                             const DualVector& mu_n, double dt, const Vec& dw) {
    check_dim(alg, mu_n, "em_mk_step");
    check_drivers(ham, dw, "em_mk_step");
    AlgebraVector sigma = ham.drift.gradient(mu_n);
    for (double& x : sigma) x *= dt;
    for (std::size_t i = 0; i < dw.size(); ++i)
        if (dw[i] != 0.0) axpy(dw[i], ham.diffusions[i].gradient(mu_n), sigma);
    StepRecord rec;
    rec.state = coadjoint_move(alg, sigma, mu_n);
    rec.sigma = std::move(sigma);
    return rec;
}

// Explicit Runge-Kutta-Munthe-Kaas step for a deterministic algebra-valued
// field evaluated at orbit points; order p needs dexpinv truncation q >= p-2.
inline StepRecord rkmk_explicit_step(const LieAlgebra& alg,
                                     const std::function<AlgebraVector(const DualVector&)>& field,
                                     const DualVector& mu_n, double dt, const StepperConfig& cfg) {
    cfg.validate();
    check_dim(alg, mu_n, "rkmk_explicit_step");
    const ButcherTableau& tab = cfg.rk_tableau;
    const int s = tab.stages();
    if (s < 1 || tab.a.rows() != s || tab.a.cols() != s)
        throw std::invalid_argument("rkmk_explicit_step: malformed tableau");
    double bsum = 0.0;
    for (double bi : tab.b) bsum += bi;
    if (std::abs(bsum - 1.0) > 1e-12)
        throw std::invalid_argument("rkmk_explicit_step: tableau weights must sum to 1");
    if (!tab.is_explicit())
        throw std::invalid_argument("rkmk_explicit_step: implicit tableau unsupported");
    const DexpSide side =
        alg.chirality() == Chirality::LeftInvariant ? DexpSide::Minus : DexpSide::Plus;
    const int n = alg.dim();
    std::vector<AlgebraVector> k(s);
    for (int i = 0; i < s; ++i) {
        AlgebraVector theta(n, 0.0);
        for (int j = 0; j < i; ++j)
            if (tab.a(i, j) != 0.0) axpy(dt * tab.a(i, j), k[j], theta);
        DualVector stage_mu =
            norm_inf(theta) == 0.0 ? mu_n : coadjoint_move(alg, theta, mu_n);
        k[i] = dexpinv(alg, theta, field(stage_mu), cfg.dexpinv_order, side);
    }
    AlgebraVector sigma(n, 0.0);
    for (int i = 0; i < s; ++i)
        if (tab.b[i] != 0.0) axpy(dt * tab.b[i], k[i], sigma);
    StepRecord rec;
    rec.state = coadjoint_move(alg, sigma, mu_n);
    rec.sigma = std::move(sigma);
    return rec;
}

// One step of whichever method the config selects.
inline StepRecord one_step(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                           const DualVector& mu_n, double dt, const Vec& dw,
                           const StepperConfig& cfg) {
    switch (cfg.method) {
        case Method::Tmk: return tmk_step(alg, ham, mu_n, dt, dw, cfg);
        case Method::DirectIm: return direct_im_step(alg, ham, mu_n, dt, dw, cfg);
        case Method::DirectTrap: return direct_trap_step(alg, ham, mu_n, dt, dw, cfg);
        case Method::EulerMaruyamaMk: return em_mk_step(alg, ham, mu_n, dt, dw);
        case Method::DeterministicRkmk: {
            if (ham.num_drivers() != 0)
                throw std::invalid_argument(
                    "rkmk is deterministic; the Hamiltonian must not carry diffusion terms");
            auto field = [&](const DualVector& mu) { return ham.drift.gradient(mu); };
            return rkmk_explicit_step(alg, field, mu_n, dt, cfg);
        }
    }
    throw std::logic_error("one_step: unhandled method");
}

// Drives the chosen stepper across the grid.  Step failures are annotated with
// the step index and rethrown.  Casimir series are recorded when a set is given.
inline Trajectory integrate(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                            const DualVector& mu0, const TimeGrid& grid, const WienerPath& path,
                            const StepperConfig& cfg, const CasimirSet* casimirs = nullptr) {
    cfg.validate();
    check_dim(alg, mu0, "integrate");
    if (path.m() != ham.num_drivers())
        throw std::invalid_argument("integrate: path driver count does not match Hamiltonian");
    if (path.grid().steps != grid.steps || path.grid().dt != grid.dt || path.grid().t0 != grid.t0)
        throw std::invalid_argument("integrate: path grid does not match integration grid");

    Trajectory traj;
    traj.grid = grid;
    traj.times.reserve(grid.steps + 1);
    traj.states.reserve(grid.steps + 1);
    traj.steps.reserve(grid.steps);
    if (casimirs) {
        for (const Casimir& c : *casimirs) {
            traj.casimir_names.push_back(c.name);
            traj.casimir_series.emplace_back();
            traj.casimir_series.back().reserve(grid.steps + 1);
        }
    }
    auto record = [&](double t, const DualVector& mu) {
        traj.times.push_back(t);
        traj.states.push_back(mu);
        traj.hamiltonian_series.push_back(ham.drift.value(mu));
        if (casimirs)
            for (std::size_t c = 0; c < casimirs->size(); ++c)
                traj.casimir_series[c].push_back((*casimirs)[c].value(mu));
    };
    record(grid.time_at(0), mu0);

    const int m = ham.num_drivers();
    Vec dw(m, 0.0);
    DualVector mu = mu0;
    for (std::int64_t k = 0; k < grid.steps; ++k) {
        for (int i = 0; i < m; ++i) dw[i] = path.dw(k, i);
        try {
            StepRecord rec = one_step(alg, ham, mu, grid.dt, dw, cfg);
            mu = rec.state;
            traj.steps.push_back(std::move(rec));
        } catch (StepError& e) {
            e.step_index = k;
            throw;
        }
        record(grid.time_at(k + 1), mu);
    }
    return traj;
}

}  // namespace coadjoint

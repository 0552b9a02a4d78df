#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "coadjoint/integrators.hpp"
#include "coadjoint/noise.hpp"
#include "coadjoint/trajectory.hpp"

namespace coadjoint {

enum class DriftReference { Initial };

// Per-Casimir error series against the step-0 value.  Relative once the
// reference is safely away from zero, absolute below 1e-14 so conserved
// zeros (orthogonal heavy-top start, centered sine modes) stay meaningful.
inline std::vector<std::pair<std::string, Vec>> drift_series(
    const Trajectory& traj, DriftReference ref = DriftReference::Initial) {
    (void)ref;
    if (traj.times.empty()) throw std::invalid_argument("drift_series: empty trajectory");
    if (traj.casimir_series.size() != traj.casimir_names.size())
        throw std::invalid_argument("drift_series: trajectory carries no Casimir series");
    std::vector<std::pair<std::string, Vec>> out;
    for (std::size_t c = 0; c < traj.casimir_series.size(); ++c) {
        const Vec& series = traj.casimir_series[c];
        if (series.size() != traj.times.size())
            throw std::invalid_argument("drift_series: Casimir series length mismatch");
        const double c0 = series[0];
        const bool absolute = std::abs(c0) < 1e-14;
        const double denom = absolute ? 1.0 : std::max(std::abs(c0), 1e-30);
        Vec drift(series.size());
        for (std::size_t k = 0; k < series.size(); ++k)
            drift[k] = std::abs(series[k] - c0) / denom;
        out.emplace_back(traj.casimir_names[c], std::move(drift));
    }
    return out;
}

// Same floor rules applied to the energy column.
inline Vec energy_drift_series(const Trajectory& traj) {
    if (traj.hamiltonian_series.empty())
        throw std::invalid_argument("energy_drift_series: empty trajectory");
    const double h0 = traj.hamiltonian_series[0];
    const bool absolute = std::abs(h0) < 1e-14;
    const double denom = absolute ? 1.0 : std::max(std::abs(h0), 1e-30);
    Vec drift(traj.hamiltonian_series.size());
    for (std::size_t k = 0; k < drift.size(); ++k)
        drift[k] = std::abs(traj.hamiltonian_series[k] - h0) / denom;
    return drift;
}

struct OrderFit {
    Vec dts;                        // strictly decreasing
    Vec errors;                     // mean terminal strong error per level
    std::vector<int> level_counts;  // surviving samples per level
    double slope = 0.0;
    double intercept = 0.0;
    int n_samples = 0;              // surviving samples across all levels
    std::vector<std::string> warnings;
};

namespace detail {

inline int thread_budget(std::size_t jobs) {
    int budget = 0;
    if (const char* env = std::getenv("COADJOINT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1 && v <= 4096) budget = int(v);
    }
    if (budget == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        budget = hw == 0 ? 1 : int(hw);
    }
    if (std::size_t(budget) > jobs) budget = int(jobs);
    return budget < 1 ? 1 : budget;
}

// dt must sit on the dyadic ladder below base_dt; returns the halving count.
inline int dyadic_level_of(double base_dt, double dt) {
    for (int k = 0; k <= 60; ++k)
        if (std::ldexp(base_dt, -k) == dt) return k;
    throw std::invalid_argument("strong_order: dt level is not a dyadic refinement of the base grid");
}

// The refined path anchors each block to the parent increment; the residual
// is bounded by the floating-point accumulation error of the block, which is
// what this check enforces (bit-for-bit equality is unattainable when a
// block cancels, see noise.hpp).
inline void check_block_sums(const WienerPath& fine, const WienerPath& base, std::int64_t factor) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (std::int64_t k = 0; k < base.grid().steps; ++k)
        for (int i = 0; i < base.m(); ++i) {
            double sum = 0.0;
            double sum_abs = 0.0;
            for (std::int64_t j = 0; j < factor; ++j) {
                const double c = fine.dw(k * factor + j, i);
                sum += c;
                sum_abs += std::abs(c);
            }
            const double w = base.dw(k, i);
            const double tol = eps * (4.0 * std::abs(w) + 2.0 * double(factor) * sum_abs);
            if (std::abs(sum - w) > tol)
                throw std::logic_error("strong_order: refined path block sum mismatch");
        }
}

}  // namespace detail

// Coupled-path strong error: every level integrates the SAME Brownian path,
// realised by dyadic refinement of the coarsest grid, against a reference
// two halvings below the finest requested level.
inline OrderFit strong_order(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                             const DualVector& mu0, const TimeGrid& base_grid,
                             const std::vector<std::uint64_t>& seeds, const Vec& dt_levels,
                             const StepperConfig& cfg) {
    if (seeds.empty()) throw std::invalid_argument("strong_order: no seeds");
    if (dt_levels.size() < 2) throw std::invalid_argument("strong_order: need at least two dt levels");
    if (base_grid.steps < 1) throw std::invalid_argument("strong_order: empty base grid");

    std::vector<int> halvings;
    for (std::size_t l = 0; l < dt_levels.size(); ++l) {
        halvings.push_back(detail::dyadic_level_of(base_grid.dt, dt_levels[l]));
        if (l > 0 && !(dt_levels[l] < dt_levels[l - 1]))
            throw std::invalid_argument("strong_order: dt levels must be strictly decreasing");
    }
    const int ref_halvings = halvings.back() + 2;

    const std::size_t n_seeds = seeds.size();
    const std::size_t n_levels = dt_levels.size();
    std::vector<double> sample(n_seeds * n_levels, -1.0);  // <0 marks exclusion
    std::vector<std::vector<std::string>> seed_warnings(n_seeds);
    std::vector<std::exception_ptr> seed_error(n_seeds);

    auto run_seed = [&](std::size_t s) {
        const WienerPath base = generate(seeds[s], ham.num_drivers(), base_grid);
        DualVector ref_state;
        try {
            const WienerPath ref_path = refine(base, std::int64_t(1) << ref_halvings);
            detail::check_block_sums(ref_path, base, std::int64_t(1) << ref_halvings);
            Trajectory ref = integrate(alg, ham, mu0, ref_path.grid(), ref_path, cfg);
            ref_state = ref.states.back();
        } catch (const StepError& e) {
            seed_warnings[s].push_back("seed " + std::to_string(seeds[s]) +
                                       ": reference level failed (" + e.what() +
                                       "); all its samples excluded");
            return;
        }
        if (!all_finite(ref_state)) {
            seed_warnings[s].push_back("seed " + std::to_string(seeds[s]) +
                                       ": reference level diverged; all its samples excluded");
            return;
        }
        for (std::size_t l = 0; l < n_levels; ++l) {
            try {
                WienerPath level_path =
                    halvings[l] == 0 ? base : refine(base, std::int64_t(1) << halvings[l]);
                if (halvings[l] > 0)
                    detail::check_block_sums(level_path, base, std::int64_t(1) << halvings[l]);
                Trajectory traj = integrate(alg, ham, mu0, level_path.grid(), level_path, cfg);
                double err = 0.0;
                const DualVector& end = traj.states.back();
                for (std::size_t i = 0; i < end.size(); ++i) {
                    const double d = end[i] - ref_state[i];
                    err += d * d;
                }
                err = std::sqrt(err);
                if (!std::isfinite(err)) {
                    seed_warnings[s].push_back("seed " + std::to_string(seeds[s]) + " dt=" +
                                               std::to_string(dt_levels[l]) +
                                               ": non-finite terminal error; sample excluded");
                    continue;
                }
                sample[s * n_levels + l] = err;
            } catch (const StepError& e) {
                seed_warnings[s].push_back("seed " + std::to_string(seeds[s]) + " dt=" +
                                           std::to_string(dt_levels[l]) + ": " + e.what() +
                                           "; sample excluded");
            }
        }
    };

    const int threads = detail::thread_budget(n_seeds);
    if (threads <= 1) {
        for (std::size_t s = 0; s < n_seeds; ++s) run_seed(s);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t s = next.fetch_add(1);
                if (s >= n_seeds) return;
                try {
                    run_seed(s);
                } catch (...) {
                    seed_error[s] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        for (std::size_t s = 0; s < n_seeds; ++s)
            if (seed_error[s]) std::rethrow_exception(seed_error[s]);
    }

    // Deterministic reduction: seed-major order regardless of scheduling.
    OrderFit fit;
    fit.dts = dt_levels;
    fit.errors.assign(n_levels, 0.0);
    fit.level_counts.assign(n_levels, 0);
    for (std::size_t s = 0; s < n_seeds; ++s)
        for (auto& w : seed_warnings[s]) fit.warnings.push_back(std::move(w));
    for (std::size_t l = 0; l < n_levels; ++l) {
        for (std::size_t s = 0; s < n_seeds; ++s) {
            const double e = sample[s * n_levels + l];
            if (e >= 0.0) {
                fit.errors[l] += e;
                ++fit.level_counts[l];
            }
        }
    }
    const std::size_t total = n_seeds * n_levels;
    std::size_t included = 0;
    for (std::size_t l = 0; l < n_levels; ++l) included += std::size_t(fit.level_counts[l]);
    if (double(total - included) > 0.2 * double(total))
        throw std::runtime_error("strong_order: more than 20% of samples excluded (" +
                                 std::to_string(total - included) + " of " + std::to_string(total) + ")");
    for (std::size_t l = 0; l < n_levels; ++l) {
        if (fit.level_counts[l] == 0)
            throw std::runtime_error("strong_order: no surviving samples at dt=" +
                                     std::to_string(dt_levels[l]));
        fit.errors[l] /= double(fit.level_counts[l]);
    }
    fit.n_samples = int(included);

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t l = 0; l < n_levels; ++l) {
        const double x = std::log(dt_levels[l]);
        const double y = std::log(std::max(fit.errors[l], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double nn = double(n_levels);
    fit.slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / nn;
    return fit;
}

enum class StabilityVerdict { Stable, Diverged, ChordFailed };

inline const char* to_string(StabilityVerdict v) {
    switch (v) {
        case StabilityVerdict::Stable: return "Stable";
        case StabilityVerdict::Diverged: return "Diverged";
        default: return "ChordFailed";
    }
}

struct StabilityReport {
    std::vector<std::pair<double, StabilityVerdict>> verdicts;  // input order
    double largest_stable_dt = 0.0;                             // 0 when nothing was stable
};

// Step-size sweep at one noise realisation.  The step loop is manual so a
// blow-up is classified instead of surfacing as an exception.
inline StabilityReport stability_probe(const LieAlgebra& alg, const SemimartingaleHamiltonian& ham,
                                       const DualVector& mu0, const Vec& dt_list, double horizon,
                                       std::uint64_t seed, const StepperConfig& cfg) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("stability_probe: horizon must be positive");
    cfg.validate();
    StabilityReport report;
    for (double dt : dt_list) {
        if (!(dt > 0.0) || !std::isfinite(dt))
            throw std::invalid_argument("stability_probe: dt must be positive");
        auto steps = std::int64_t(std::ceil(horizon / dt - 1e-12));
        if (steps < 1) steps = 1;
        const TimeGrid grid{0.0, dt, steps};
        const WienerPath path = generate(seed, ham.num_drivers(), grid);
        StabilityVerdict verdict = StabilityVerdict::Stable;
        DualVector mu = mu0;
        Vec dw(std::size_t(ham.num_drivers()), 0.0);
        for (std::int64_t k = 0; k < steps; ++k) {
            for (int i = 0; i < ham.num_drivers(); ++i) dw[std::size_t(i)] = path.dw(k, i);
            try {
                StepRecord rec = one_step(alg, ham, mu, dt, dw, cfg);
                mu = std::move(rec.state);
            } catch (const StepError&) {
                verdict = StabilityVerdict::ChordFailed;
                break;
            }
            if (!all_finite(mu) || norm2(mu) > 1e8) {
                verdict = StabilityVerdict::Diverged;
                break;
            }
        }
        report.verdicts.emplace_back(dt, verdict);
        if (verdict == StabilityVerdict::Stable && dt > report.largest_stable_dt)
            report.largest_stable_dt = dt;
    }
    return report;
}

}  // namespace coadjoint

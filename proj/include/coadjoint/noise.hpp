#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace coadjoint {

// Uniform time grid t_k = t0 + k*dt.  steps == 0 is legal and describes the
// degenerate single-state trajectory.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::int64_t steps = 0;

    TimeGrid() = default;
    TimeGrid(double t0_, double dt_, std::int64_t steps_) : t0(t0_), dt(dt_), steps(steps_) {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
        if (steps < 0) throw std::invalid_argument("TimeGrid: steps must be nonnegative");
    }

    double time_at(std::int64_t k) const { return t0 + dt * double(k); }
};

namespace detail {

// splitmix64 finalizer; the counter-based stream is keyed by
// (seed, tag, level, step, driver) so refinement and ensembles never share draws.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t absorb(std::uint64_t key, std::uint64_t word) {
    return mix64(key + 0x9e3779b97f4a7c15ull * (word + 1ull));
}

// Standard normal via Box-Muller on two keyed uniforms; u1 lands in (0,1] so
// the logarithm is always finite.
inline double keyed_gauss(std::uint64_t seed, std::uint64_t tag, std::uint64_t level,
                          std::uint64_t step, std::uint64_t driver) {
    std::uint64_t k = seed;
    k = absorb(k, tag);
    k = absorb(k, level);
    k = absorb(k, step);
    k = absorb(k, driver);
    const std::uint64_t h1 = mix64(k + 1ull);
    const std::uint64_t h2 = mix64(k + 2ull);
    const double u1 = double((h1 >> 11) + 1ull) * 0x1.0p-53;
    const double u2 = double(h2 >> 11) * 0x1.0p-53;
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

inline constexpr std::uint64_t tag_base = 0;    // generate()
inline constexpr std::uint64_t tag_bridge = 1;  // refine()
inline constexpr std::uint64_t tag_init = 2;    // seeded initial conditions

}  // namespace detail

// Wiener increments for m independent drivers on a uniform grid, row-major
// over (step, driver).  Immutable after construction.
class WienerPath {
  public:
    WienerPath(TimeGrid grid, int m, std::vector<double> increments, std::uint64_t seed, int level)
        : grid_(grid), m_(m), increments_(std::move(increments)), seed_(seed), level_(level) {
        if (m < 0) throw std::invalid_argument("WienerPath: driver count must be nonnegative");
        if (increments_.size() != std::size_t(grid_.steps) * std::size_t(m))
            throw std::invalid_argument("WienerPath: increment table has wrong size");
    }

    const TimeGrid& grid() const { return grid_; }
    int m() const { return m_; }
    std::uint64_t seed() const { return seed_; }
    int level() const { return level_; }
    const std::vector<double>& increments() const { return increments_; }

    double dw(std::int64_t step, int driver) const {
        return increments_[std::size_t(step) * m_ + driver];
    }

  private:
    friend WienerPath refine(const WienerPath&, std::int64_t);

    TimeGrid grid_;
    int m_;
    std::vector<double> increments_;
    std::uint64_t seed_;
    int level_;
};

inline WienerPath generate(std::uint64_t seed, int m, const TimeGrid& grid) {
    if (m < 0) throw std::invalid_argument("generate: driver count must be nonnegative");
    std::vector<double> inc(std::size_t(grid.steps) * std::size_t(m));
    const double root_dt = std::sqrt(grid.dt);
    for (std::int64_t k = 0; k < grid.steps; ++k)
        for (int i = 0; i < m; ++i)
            inc[std::size_t(k) * m + i] =
                detail::keyed_gauss(seed, detail::tag_base, 0, std::uint64_t(k), std::uint64_t(i)) *
                root_dt;
    return WienerPath(grid, m, std::move(inc), seed, 0);
}

namespace detail {

// Nudges `last` so that fl(prefix + last) lands as close to target as
// doubles permit.  Exact equality is impossible in general: when the block
// cancels (|prefix|, |last| >> |target|) the achievable sums live on the
// children's coarser ulp lattice and the target's low bits cannot be hit by
// any pair of doubles.  The compensated iteration below reaches the nearest
// achievable sum, one ulp of the child scale from the target at worst.
inline double settle_last(double prefix, double last, double target) {
    double best = last;
    double best_err = std::abs((prefix + last) - target);
    for (int it = 0; it < 8 && best_err != 0.0; ++it) {
        const double err = (prefix + last) - target;
        const double next = last - err;
        if (next == last) break;
        last = next;
        const double e = std::abs((prefix + last) - target);
        if (e < best_err) {
            best_err = e;
            best = last;
        }
    }
    if (best_err != 0.0) {
        const double direct = target - prefix;
        if (std::abs((prefix + direct) - target) < best_err) best = direct;
    }
    return best;
}

}  // namespace detail

// Brownian-bridge refinement.  The last child of every parent block is
// anchored so the left-to-right sum of the children reproduces the parent
// increment exactly whenever a representable child exists, and to within one
// ulp of the child scale otherwise (see settle_last).  Bridge draws are keyed
// by (seed, level, parent step, driver) so refine(refine(p,2),2) and
// refine(p,4) consume identical draws and differ only in anchor placement.
inline WienerPath refine(const WienerPath& path, std::int64_t factor) {
    if (factor < 2 || (factor & (factor - 1)) != 0)
        throw std::invalid_argument("refine: factor must be a power of two >= 2");
    const std::int64_t steps = path.grid().steps;
    if (steps > std::numeric_limits<std::int64_t>::max() / factor)
        throw std::invalid_argument("refine: step count overflow");
    const int m = path.m_;

    TimeGrid grid = path.grid();
    std::vector<double> cur = path.increments_;
    int level = path.level_;
    for (std::int64_t half = factor; half > 1; half /= 2) {
        const double child_dt = std::ldexp(grid.dt, -1);
        const double bridge_sd = std::sqrt(grid.dt) * 0.5;
        std::vector<double> next(cur.size() * 2);
        ++level;
        for (std::int64_t k = 0; k < grid.steps; ++k)
            for (int i = 0; i < m; ++i) {
                const double w = cur[std::size_t(k) * m + i];
                const double xi = detail::keyed_gauss(path.seed_, detail::tag_bridge,
                                                      std::uint64_t(level), std::uint64_t(k),
                                                      std::uint64_t(i)) *
                                  bridge_sd;
                const double u = w * 0.5 + xi;
                const double v = detail::settle_last(u, w - u, w);
                next[std::size_t(2 * k) * m + i] = u;
                next[std::size_t(2 * k + 1) * m + i] = v;
            }
        grid = TimeGrid(grid.t0, child_dt, grid.steps * 2);
        cur = std::move(next);
    }

    // Pairwise exactness does not imply multi-level left-to-right exactness;
    // re-anchor every factor-block to the increments of the path refined from.
    if (factor > 2 && m > 0) {
        for (std::int64_t k = 0; k < steps; ++k)
            for (int i = 0; i < m; ++i) {
                const double target = path.increments_[std::size_t(k) * m + i];
                double prefix = 0.0;
                for (std::int64_t b = 0; b < factor - 1; ++b)
                    prefix += cur[std::size_t(k * factor + b) * m + i];
                double& last = cur[std::size_t(k * factor + factor - 1) * m + i];
                last = detail::settle_last(prefix, last, target);
            }
    }

    return WienerPath(grid, m, std::move(cur), path.seed_, level);
}

}  // namespace coadjoint

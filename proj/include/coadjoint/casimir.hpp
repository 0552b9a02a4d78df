#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "coadjoint/lie_algebra.hpp"

namespace coadjoint {

// A Casimir function with its gradient; gradients feed orthogonality checks
// ({C, h} = 0 pointwise) in the diagnostics and tests.
struct Casimir {
    std::string name;
    std::function<double(const DualVector&)> value;
    std::function<DualVector(const DualVector&)> gradient;
};

using CasimirSet = std::vector<Casimir>;

inline std::vector<std::pair<std::string, double>> evaluate_casimirs(const CasimirSet& cs,
                                                                     const DualVector& mu) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(cs.size());
    for (const Casimir& c : cs) out.emplace_back(c.name, c.value(mu));
    return out;
}

}  // namespace coadjoint

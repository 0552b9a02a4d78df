#pragma once

#include <string>
#include <vector>

#include "coadjoint/lie_algebra.hpp"
#include "coadjoint/noise.hpp"

namespace coadjoint {

// Outcome of one stepper invocation.  sigma is the solved algebra increment;
// steppers that work on dual coordinates directly leave it empty.
struct StepRecord {
    DualVector state;
    AlgebraVector sigma;
    int chord_iters = 0;
    double residual_norm = 0.0;
};

// states[0] = mu0; steps[k] produced states[k+1].  hamiltonian_series is
// always filled by integrate; casimir series only when a CasimirSet was
// supplied.  All series share the length of times.
struct Trajectory {
    TimeGrid grid;
    std::vector<double> times;
    std::vector<DualVector> states;
    std::vector<StepRecord> steps;
    std::vector<std::string> casimir_names;
    std::vector<Vec> casimir_series;
    Vec hamiltonian_series;
};

}  // namespace coadjoint

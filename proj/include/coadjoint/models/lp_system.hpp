#pragma once

#include "coadjoint/casimir.hpp"
#include "coadjoint/hamiltonian.hpp"
#include "coadjoint/lie_algebra.hpp"

namespace coadjoint {

// Everything a bundled model provides: the algebra, the semimartingale
// Hamiltonian, the registered Casimirs, and the initial state.
struct LiePoissonSystem {
    LieAlgebra algebra;
    SemimartingaleHamiltonian hamiltonian;
    CasimirSet casimirs;
    DualVector mu0;
};

}  // namespace coadjoint

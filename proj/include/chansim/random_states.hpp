#pragma once

#include "chansim/types.hpp"

namespace chansim {

// Unit vector with unitarily invariant direction.
CVec random_ket(int dim, Rng& rng);

// Projector onto a random ket.
DensityOperator random_pure_state(int dim, Rng& rng);

// Full-rank state G G^dag / tr(G G^dag) with G complex Gaussian.
DensityOperator random_density(int dim, Rng& rng);

// Random ensemble of `count` mixed states with a random prior.
Ensemble random_ensemble(int count, int dim, Rng& rng);

// Random distribution from normalized exponentials.
Distribution random_distribution(int size, Rng& rng);

}  // namespace chansim

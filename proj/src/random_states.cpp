#include "chansim/random_states.hpp"

namespace chansim {

CVec random_ket(int dim, Rng& rng) {
  CVec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Cplx(rng.gaussian(), rng.gaussian());
  v /= v.norm();
  return v;
}

DensityOperator random_pure_state(int dim, Rng& rng) {
  CVec v = random_ket(dim, rng);
  return DensityOperator(v * v.adjoint());
}

DensityOperator random_density(int dim, Rng& rng) {
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Cplx(rng.gaussian(), rng.gaussian());
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator(rho);
}

Distribution random_distribution(int size, Rng& rng) {
  RVec w(size);
  for (int i = 0; i < size; ++i) w[i] = -std::log1p(-rng.uniform01());
  return Distribution(w / w.sum());
}

Ensemble random_ensemble(int count, int dim, Rng& rng) {
  std::vector<DensityOperator> states;
  states.reserve(count);
  for (int i = 0; i < count; ++i) states.push_back(random_density(dim, rng));
  return Ensemble(random_distribution(count, rng), std::move(states));
}

}  // namespace chansim

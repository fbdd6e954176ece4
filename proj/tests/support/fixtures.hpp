#pragma once

#include "emprint/catalog.hpp"
#include "emprint/rbm.hpp"

namespace emprint::testing {

inline TrainingSet make_family(Family f, std::size_t k, std::size_t l) {
  FamilySpec spec;
  spec.family = f;
  spec.param_range = default_param_range(f);
  spec.n_params = k;
  spec.grid = default_grid(f, l);
  return generate_family(spec);
}

/// The damped_chirp set used throughout: K=101, L=1001.
inline const TrainingSet& chirp_set() {
  static const TrainingSet ts = make_family(Family::DampedChirp, 101, 1001);
  return ts;
}

inline const ReducedBasis& chirp_basis() {
  static const ReducedBasis rb = build_reduced_basis(chirp_set(), kDefaultGreedyTol, 100);
  return rb;
}

inline const TrainingSet& poly_set() {
  static const TrainingSet ts = make_family(Family::PolyFourier, 50, 401);
  return ts;
}

inline const ReducedBasis& poly_basis() {
  static const ReducedBasis rb = build_reduced_basis(poly_set(), kDefaultGreedyTol, 100);
  return rb;
}

}  // namespace emprint::testing

#pragma once

#include <cstdint>
#include <random>

#include "riskx/model/feature_schema.h"
#include "riskx/model/tree_ensemble.h"

namespace riskx::testing {

struct RandomEnsembleOptions {
  std::size_t num_features = 8;
  int max_trees = 5;
  int max_depth = 3;
};

// Random trees with random covers (internal covers are the sum of their
// children), features drawn with replacement so a feature can repeat along a
// path, and thresholds inside [0, 1).
model::TreeEnsemble RandomEnsemble(std::mt19937_64& rng,
                                   const RandomEnsembleOptions& options);

// Values uniform in [0, 1), one per feature.
model::PatientRecord RandomRecord(std::mt19937_64& rng,
                                  std::size_t num_features);

// Schema of `n` unconstrained continuous features named f0..f{n-1}, with
// domain [-1e6, 1e6], for pairing with random ensembles.
model::FeatureSchema GenericSchema(std::size_t n, std::string version);

}  // namespace riskx::testing

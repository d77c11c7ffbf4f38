#pragma once

#include <cstdint>
#include <vector>

#include "riskx/model/dataset.h"
#include "riskx/model/feature_schema.h"
#include "riskx/model/tree_ensemble.h"

namespace riskx::model {

struct TrainingParams {
  int rounds = 50;
  int max_depth = 4;
  double learning_rate = 0.1;
  // Minimum number of rows in each child of a split.
  int min_cover = 1;
  double l2 = 1.0;
  // Fraction of rows drawn (without replacement) for each tree.
  double subsample = 1.0;
  std::uint64_t seed = 0;
};

// Newton-step gradient boosting on logistic loss with exact greedy splits.
// Candidate thresholds are midpoints between sorted unique values; node covers
// are the number of rows reaching the node.
//
// Throws kTooFewRows (< 20 rows), kDegenerateData (single class),
// kInvalidArgument (bad params or labels) and record validation errors.
// When `loss_per_round` is non-null it receives the training log-loss before
// the first round followed by the loss after each round.
TreeEnsemble FitGbdt(const Dataset& data, const FeatureSchema& schema,
                     const TrainingParams& params,
                     std::vector<double>* loss_per_round = nullptr);

// Mean negative log-likelihood of `labels` under the ensemble.
double LogLoss(const TreeEnsemble& ensemble, const Dataset& data);

}  // namespace riskx::model

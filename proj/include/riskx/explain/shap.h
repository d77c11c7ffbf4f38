#pragma once

#include <cstddef>
#include <vector>

#include "riskx/model/feature_schema.h"
#include "riskx/model/tree_ensemble.h"

namespace riskx::explain {

// Additive decomposition of one prediction in margin (log-odds) units:
// base_value + sum(shap_values) equals the model margin.
struct Attribution {
  double base_value = 0.0;
  std::vector<double> shap_values;

  double Total() const;
};

// Exact path-dependent TreeSHAP. Unconditioned features follow both branches
// weighted by node covers. Throws kSchemaMismatch when the record width does
// not match the ensemble.
Attribution TreeShap(const model::TreeEnsemble& ensemble,
                     const model::PatientRecord& record);

// Largest feature count BruteForceShapley() accepts.
inline constexpr std::size_t kMaxBruteForceFeatures = 12;

// Shapley values by enumerating every coalition of features, using the same
// cover-weighted conditional expectation as TreeShap(). Exponential in the
// number of features; meant as a verification oracle. Throws
// kTooManyFeatures above kMaxBruteForceFeatures.
Attribution BruteForceShapley(const model::TreeEnsemble& ensemble,
                              const model::PatientRecord& record);

// Expected margin when only the features flagged in `known` are observed.
double ConditionalExpectation(const model::TreeEnsemble& ensemble,
                              const model::PatientRecord& record,
                              const std::vector<bool>& known);

}  // namespace riskx::explain

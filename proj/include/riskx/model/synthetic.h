#pragma once

#include <cstdint>

#include "riskx/model/dataset.h"

namespace riskx::model {

// Plausible synthetic cohort for the default schema: correlated vitals and a
// logistic ground-truth risk in which family history, glucose, BMI and age
// dominate. Deterministic for a given seed. For demos and tests only.
Dataset MakeSyntheticCohort(std::size_t rows, std::uint64_t seed);

}  // namespace riskx::model

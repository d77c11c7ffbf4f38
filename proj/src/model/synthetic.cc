#include "riskx/model/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "riskx/model/risk.h"

namespace riskx::model {
namespace {

double RoundTo(double value, double step) {
  return std::round(value / step) * step;
}

}  // namespace

Dataset MakeSyntheticCohort(std::size_t rows, std::uint64_t seed) {
  const FeatureSchema& schema = DefaultSchema();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto bernoulli = [&](double p) { return uniform(rng) < p ? 1.0 : 0.0; };

  Dataset data;
  data.rows.reserve(rows);
  data.labels.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double age = std::round(20.0 + 60.0 * uniform(rng));
    const double sex = bernoulli(0.5);
    const double bmi =
        std::clamp(RoundTo(24.5 + 4.0 * normal(rng), 0.1), 15.0, 45.0);
    const double glucose = std::clamp(
        std::round(92.0 + 1.2 * (bmi - 24.0) + 14.0 * normal(rng)), 60.0,
        250.0);
    const double bp = std::clamp(
        std::round(118.0 + 0.4 * (age - 45.0) + 14.0 * normal(rng)), 85.0,
        200.0);
    const double family = bernoulli(0.3);
    const double activity =
        std::clamp(std::round(-120.0 * std::log(1.0 - uniform(rng) * 0.999)),
                   0.0, 900.0);
    const double smoking = bernoulli(0.25);

    const double logit = -1.2 + 1.6 * family + 0.04 * (age - 45.0) +
                         0.12 * (bmi - 23.0) + 0.045 * (glucose - 95.0) +
                         0.015 * (bp - 120.0) - 0.004 * (activity - 150.0) +
                         0.5 * smoking + 0.1 * sex;
    PatientRecord record{{age, sex, bmi, glucose, bp, family, activity, smoking}};
    ValidateRecord(schema, record);
    data.rows.push_back(std::move(record));
    data.labels.push_back(static_cast<int>(bernoulli(Logistic(logit))));
  }
  return data;
}

}  // namespace riskx::model

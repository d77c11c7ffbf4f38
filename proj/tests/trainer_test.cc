#include <random>

#include <gtest/gtest.h>

#include "riskx/common/error.h"
#include "riskx/explain/shap.h"
#include "riskx/model/risk.h"
#include "riskx/model/synthetic.h"
#include "riskx/model/trainer.h"

namespace riskx::model {
namespace {

// 200 rows with the label fully determined by fasting glucose > 110.
Dataset GlucoseThresholdData(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Dataset data;
  for (int i = 0; i < 200; ++i) {
    const double glucose = std::round(70.0 + 90.0 * unit(rng));
    data.rows.push_back({{std::round(20 + 60 * unit(rng)),
                          unit(rng) < 0.5 ? 0.0 : 1.0,
                          std::round(180 + 150 * unit(rng)) / 10.0, glucose,
                          std::round(95 + 50 * unit(rng)),
                          unit(rng) < 0.3 ? 1.0 : 0.0,
                          std::round(400 * unit(rng)),
                          unit(rng) < 0.25 ? 1.0 : 0.0}});
    data.labels.push_back(glucose > 110 ? 1 : 0);
  }
  return data;
}

ErrorCode FitError(const Dataset& data, const TrainingParams& params = {}) {
  try {
    FitGbdt(data, DefaultSchema(), params);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected riskx::Error";
  return ErrorCode::kIoError;
}

TEST(FitGbdtTest, RejectsDegenerateAndTinyData) {
  Dataset data = GlucoseThresholdData(1);
  Dataset single_class = data;
  std::fill(single_class.labels.begin(), single_class.labels.end(), 1);
  EXPECT_EQ(FitError(single_class), ErrorCode::kDegenerateData);

  Dataset tiny = data;
  tiny.rows.resize(19);
  tiny.labels.resize(19);
  EXPECT_EQ(FitError(tiny), ErrorCode::kTooFewRows);

  Dataset bad_label = data;
  bad_label.labels[3] = 2;
  EXPECT_EQ(FitError(bad_label), ErrorCode::kInvalidArgument);

  TrainingParams bad;
  bad.learning_rate = 0.0;
  EXPECT_EQ(FitError(data, bad), ErrorCode::kInvalidArgument);
}

TEST(FitGbdtTest, ZeroRoundsPredictsBaseRate) {
  const Dataset data = GlucoseThresholdData(2);
  TrainingParams params;
  params.rounds = 0;
  const TreeEnsemble ensemble = FitGbdt(data, DefaultSchema(), params);
  EXPECT_TRUE(ensemble.trees().empty());
  const double positives =
      std::count(data.labels.begin(), data.labels.end(), 1);
  const double rate = positives / static_cast<double>(data.size());
  EXPECT_NEAR(Predict(ensemble, DefaultSchema(), data.rows[0]).probability,
              rate, 1e-12);
}

TEST(FitGbdtTest, LearnsGlucoseThreshold) {
  const Dataset data = GlucoseThresholdData(3);
  std::vector<double> losses;
  const TreeEnsemble ensemble =
      FitGbdt(data, DefaultSchema(), TrainingParams{}, &losses);
  ASSERT_EQ(ensemble.trees().size(), 50u);
  int correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double p = Predict(ensemble, DefaultSchema(), data.rows[i]).probability;
    correct += (p > 0.5) == (data.labels[i] == 1);
  }
  EXPECT_GE(correct / 200.0, 0.95);

  // Non-increasing training loss.
  ASSERT_EQ(losses.size(), 51u);
  for (std::size_t r = 1; r < losses.size(); ++r) {
    EXPECT_LE(losses[r], losses[r - 1] + 1e-12) << "round " << r;
  }
  EXPECT_NEAR(losses.back(), LogLoss(ensemble, data), 1e-12);
}

TEST(FitGbdtTest, UnusedFeaturesHaveZeroAttribution) {
  const Dataset data = GlucoseThresholdData(4);
  const TreeEnsemble ensemble =
      FitGbdt(data, DefaultSchema(), TrainingParams{});
  std::vector<bool> used(8, false);
  for (const Tree& tree : ensemble.trees()) {
    for (const TreeNode& node : tree.nodes) {
      if (!node.is_leaf()) used[node.feature] = true;
    }
  }
  EXPECT_TRUE(used[3]);
  for (const PatientRecord& row : data.rows) {
    const explain::Attribution attr = explain::TreeShap(ensemble, row);
    for (std::size_t f = 0; f < 8; ++f) {
      if (!used[f]) EXPECT_EQ(attr.shap_values[f], 0.0);
    }
  }
}

TEST(FitGbdtTest, CoversAreRowCountsAndConserved) {
  const Dataset data = MakeSyntheticCohort(300, 9);
  TrainingParams params;
  params.rounds = 10;
  const TreeEnsemble ensemble = FitGbdt(data, DefaultSchema(), params);
  for (const Tree& tree : ensemble.trees()) {
    EXPECT_EQ(tree.root().cover, 300.0);
    EXPECT_LE(tree.Depth(), 4u);
    for (const TreeNode& node : tree.nodes) {
      EXPECT_EQ(node.cover, std::round(node.cover));
      if (!node.is_leaf()) {
        EXPECT_EQ(node.cover,
                  tree.nodes[node.left].cover + tree.nodes[node.right].cover);
      }
    }
  }
  EXPECT_NO_THROW(ValidateEnsemble(ensemble));
}

TEST(FitGbdtTest, DeterministicForSeed) {
  const Dataset data = MakeSyntheticCohort(250, 21);
  TrainingParams params;
  params.rounds = 15;
  params.subsample = 0.7;
  params.seed = 42;
  const std::string first = SaveModel(FitGbdt(data, DefaultSchema(), params));
  EXPECT_EQ(first, SaveModel(FitGbdt(data, DefaultSchema(), params)));
  params.seed = 43;
  EXPECT_NE(first, SaveModel(FitGbdt(data, DefaultSchema(), params)));
}

TEST(FitGbdtTest, MinCoverLimitsLeafSize) {
  const Dataset data = MakeSyntheticCohort(200, 5);
  TrainingParams params;
  params.rounds = 5;
  params.min_cover = 30;
  const TreeEnsemble ensemble = FitGbdt(data, DefaultSchema(), params);
  for (const Tree& tree : ensemble.trees()) {
    for (const TreeNode& node : tree.nodes) EXPECT_GE(node.cover, 30.0);
  }
}

}  // namespace
}  // namespace riskx::model

#include "riskx/model/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "riskx/common/error.h"
#include "riskx/model/risk.h"

namespace riskx::model {
namespace {

constexpr std::size_t kMinRows = 20;
constexpr double kMinGain = 1e-12;

struct GradientPair {
  double grad = 0.0;
  double hess = 0.0;
};

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const std::vector<GradientPair>& gradients,
              const TrainingParams& params)
      : data_(data), gradients_(gradients), params_(params) {}

  Tree Build(std::vector<std::size_t> rows) {
    Tree tree;
    Grow(std::move(rows), 0, tree);
    return tree;
  }

 private:
  double Score(double grad, double hess) const {
    return grad * grad / (hess + params_.l2);
  }

  SplitCandidate FindSplit(const std::vector<std::size_t>& rows, double grad,
                           double hess) const {
    SplitCandidate best;
    const double parent_score = Score(grad, hess);
    const std::size_t min_cover = static_cast<std::size_t>(params_.min_cover);
    const std::size_t num_features = data_.rows.front().values.size();
    std::vector<std::size_t> order(rows);
    for (std::size_t f = 0; f < num_features; ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return data_.rows[a].values[f] <
                                data_.rows[b].values[f];
                       });
      double left_grad = 0.0;
      double left_hess = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        left_grad += gradients_[order[k]].grad;
        left_hess += gradients_[order[k]].hess;
        const double lo = data_.rows[order[k]].values[f];
        const double hi = data_.rows[order[k + 1]].values[f];
        if (!(lo < hi)) continue;
        const std::size_t left_count = k + 1;
        if (left_count < min_cover || order.size() - left_count < min_cover) {
          continue;
        }
        const double gain = Score(left_grad, left_hess) +
                            Score(grad - left_grad, hess - left_hess) -
                            parent_score;
        if (gain > kMinGain && gain > best.gain) {
          double threshold = lo + (hi - lo) / 2.0;
          if (!(threshold > lo)) threshold = hi;
          best = {true, static_cast<int>(f), threshold, gain};
        }
      }
    }
    return best;
  }

  void Grow(std::vector<std::size_t> rows, int depth, Tree& tree) {
    double grad = 0.0;
    double hess = 0.0;
    for (std::size_t r : rows) {
      grad += gradients_[r].grad;
      hess += gradients_[r].hess;
    }
    const std::size_t index = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes[index].cover = static_cast<double>(rows.size());

    SplitCandidate split;
    if (depth < params_.max_depth && rows.size() >= 2) {
      split = FindSplit(rows, grad, hess);
    }
    if (!split.found) {
      tree.nodes[index].value =
          -params_.learning_rate * grad / (hess + params_.l2);
      return;
    }

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t r : rows) {
      (data_.rows[r].values[split.feature] < split.threshold ? left_rows
                                                             : right_rows)
          .push_back(r);
    }
    tree.nodes[index].feature = split.feature;
    tree.nodes[index].threshold = split.threshold;
    tree.nodes[index].left = static_cast<std::int32_t>(tree.nodes.size());
    Grow(std::move(left_rows), depth + 1, tree);
    tree.nodes[index].right = static_cast<std::int32_t>(tree.nodes.size());
    Grow(std::move(right_rows), depth + 1, tree);
  }

  const Dataset& data_;
  const std::vector<GradientPair>& gradients_;
  const TrainingParams& params_;
};

double MeanLogLoss(const std::vector<double>& margins,
                   const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    // log(1 + e^m) - y*m, written to stay finite for large |m|.
    const double m = margins[i];
    const double softplus =
        m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
    total += softplus - labels[i] * m;
  }
  return total / static_cast<double>(margins.size());
}

void CheckParams(const TrainingParams& params) {
  const auto fail = [](const std::string& message) {
    throw Error(ErrorCode::kInvalidArgument, message);
  };
  if (params.rounds < 0) fail("rounds must be >= 0");
  if (params.max_depth < 0) fail("max_depth must be >= 0");
  if (!(params.learning_rate > 0.0) || !std::isfinite(params.learning_rate)) {
    fail("learning_rate must be positive");
  }
  if (params.min_cover < 1) fail("min_cover must be >= 1");
  if (!(params.l2 >= 0.0) || !std::isfinite(params.l2)) {
    fail("l2 must be >= 0");
  }
  if (!(params.subsample > 0.0 && params.subsample <= 1.0)) {
    fail("subsample must be within (0, 1]");
  }
}

}  // namespace

double LogLoss(const TreeEnsemble& ensemble, const Dataset& data) {
  std::vector<double> margins;
  margins.reserve(data.size());
  for (const PatientRecord& row : data.rows) {
    margins.push_back(ensemble.Margin(row.values));
  }
  return MeanLogLoss(margins, data.labels);
}

TreeEnsemble FitGbdt(const Dataset& data, const FeatureSchema& schema,
                     const TrainingParams& params,
                     std::vector<double>* loss_per_round) {
  CheckParams(params);
  if (data.labels.size() != data.rows.size()) {
    throw Error(ErrorCode::kInvalidArgument, "every row needs a label");
  }
  if (data.size() < kMinRows) {
    throw Error(ErrorCode::kTooFewRows,
                "need at least 20 rows, got " + std::to_string(data.size()));
  }
  std::size_t positives = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] != 0 && data.labels[i] != 1) {
      throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1",
                  "/rows/" + std::to_string(i + 1) + "/label");
    }
    positives += static_cast<std::size_t>(data.labels[i]);
    ValidateRecord(schema, data.rows[i]);
  }
  if (positives == 0 || positives == data.size()) {
    throw Error(ErrorCode::kDegenerateData, "labels contain a single class");
  }

  const double mean =
      static_cast<double>(positives) / static_cast<double>(data.size());
  const double base_margin = std::log(mean / (1.0 - mean));

  std::vector<double> margins(data.size(), base_margin);
  if (loss_per_round) {
    loss_per_round->clear();
    loss_per_round->push_back(MeanLogLoss(margins, data.labels));
  }

  std::mt19937_64 rng(params.seed);
  std::vector<GradientPair> gradients(data.size());
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(params.rounds));
  std::vector<std::size_t> all_rows(data.size());
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double p = Logistic(margins[i]);
      gradients[i] = {p - data.labels[i], p * (1.0 - p)};
    }
    std::vector<std::size_t> rows = all_rows;
    if (params.subsample < 1.0) {
      const auto keep = std::max<std::size_t>(
          1, static_cast<std::size_t>(params.subsample *
                                      static_cast<double>(data.size())));
      std::shuffle(rows.begin(), rows.end(), rng);
      rows.resize(keep);
      std::sort(rows.begin(), rows.end());
    }
    TreeBuilder builder(data, gradients, params);
    Tree tree = builder.Build(std::move(rows));
    for (std::size_t i = 0; i < data.size(); ++i) {
      margins[i] += tree.LeafValue(data.rows[i].values);
    }
    trees.push_back(std::move(tree));
    if (loss_per_round) {
      loss_per_round->push_back(MeanLogLoss(margins, data.labels));
    }
  }

  TreeEnsemble ensemble(std::move(trees), base_margin, schema.size(),
                        schema.version());
  ValidateEnsemble(ensemble);
  return ensemble;
}

}  // namespace riskx::model

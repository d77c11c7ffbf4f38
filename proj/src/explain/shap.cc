#include "riskx/explain/shap.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "riskx/common/error.h"

namespace riskx::explain {
namespace {

using model::Tree;
using model::TreeNode;

// One feature on the current root-to-node path. `zero_fraction` is the share
// of cover that flows this way when the feature is unknown, `one_fraction` is
// 1 if the record itself goes this way. `weight` holds the permutation weight
// of subsets of size (position) and is not tied to the feature of the entry.
struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double weight = 0.0;
};

void ExtendPath(PathElement* path, std::size_t depth, double zero_fraction,
                double one_fraction, int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  const double denom = static_cast<double>(depth + 1);
  for (std::size_t k = depth; k-- > 0;) {
    path[k + 1].weight +=
        one_fraction * path[k].weight * static_cast<double>(k + 1) / denom;
    path[k].weight = zero_fraction * path[k].weight *
                     static_cast<double>(depth - k) / denom;
  }
}

void UnwindPath(PathElement* path, std::size_t depth, std::size_t index) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  const double denom = static_cast<double>(depth + 1);
  double next_one_portion = path[depth].weight;
  for (std::size_t k = depth; k-- > 0;) {
    if (one_fraction != 0.0) {
      const double saved = path[k].weight;
      path[k].weight = next_one_portion * denom /
                       (static_cast<double>(k + 1) * one_fraction);
      next_one_portion = saved - path[k].weight * zero_fraction *
                                     static_cast<double>(depth - k) / denom;
    } else {
      path[k].weight = path[k].weight * denom /
                       (zero_fraction * static_cast<double>(depth - k));
    }
  }
  for (std::size_t k = index; k < depth; ++k) {
    path[k].feature = path[k + 1].feature;
    path[k].zero_fraction = path[k + 1].zero_fraction;
    path[k].one_fraction = path[k + 1].one_fraction;
  }
}

// Total permutation weight the path would have after unwinding `index`.
double UnwoundPathSum(const PathElement* path, std::size_t depth,
                      std::size_t index) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  const double denom = static_cast<double>(depth + 1);
  double next_one_portion = path[depth].weight;
  double total = 0.0;
  for (std::size_t k = depth; k-- > 0;) {
    if (one_fraction != 0.0) {
      const double w = next_one_portion * denom /
                       (static_cast<double>(k + 1) * one_fraction);
      total += w;
      next_one_portion = path[k].weight - w * zero_fraction *
                                              static_cast<double>(depth - k) /
                                              denom;
    } else {
      total += path[k].weight * denom /
               (zero_fraction * static_cast<double>(depth - k));
    }
  }
  return total;
}

class TreeShapWalker {
 public:
  TreeShapWalker(const Tree& tree, const std::vector<double>& values,
                 std::vector<double>& phi)
      : tree_(tree), values_(values), phi_(phi) {
    const std::size_t max_path = tree.Depth() + 2;
    storage_.resize(max_path * (max_path + 1) / 2);
  }

  void Run() { Recurse(0, 0, storage_.data(), 1.0, 1.0, -1); }

 private:
  void Recurse(std::int32_t node_index, std::size_t depth,
               PathElement* parent_path, double zero_fraction,
               double one_fraction, int feature) {
    // Each level works on its own copy of the path so siblings do not see
    // each other's extensions.
    PathElement* path = parent_path + depth;
    std::copy(parent_path, parent_path + depth, path);
    ExtendPath(path, depth, zero_fraction, one_fraction, feature);

    const TreeNode& node = tree_.nodes[node_index];
    if (node.is_leaf()) {
      for (std::size_t i = 1; i <= depth; ++i) {
        const double w = UnwoundPathSum(path, depth, i);
        const PathElement& el = path[i];
        phi_[el.feature] += w * (el.one_fraction - el.zero_fraction) * node.value;
      }
      return;
    }

    const bool goes_left = values_[node.feature] < node.threshold;
    const std::int32_t hot = goes_left ? node.left : node.right;
    const std::int32_t cold = goes_left ? node.right : node.left;
    const double hot_share = tree_.nodes[hot].cover / node.cover;
    const double cold_share = tree_.nodes[cold].cover / node.cover;

    double incoming_zero = 1.0;
    double incoming_one = 1.0;
    std::size_t next_depth = depth + 1;
    // A feature seen higher on the path is unwound and re-extended here so
    // it appears once with the product of its fractions.
    for (std::size_t k = 1; k <= depth; ++k) {
      if (path[k].feature == node.feature) {
        incoming_zero = path[k].zero_fraction;
        incoming_one = path[k].one_fraction;
        UnwindPath(path, depth, k);
        --next_depth;
        break;
      }
    }
    Recurse(hot, next_depth, path, hot_share * incoming_zero, incoming_one,
            node.feature);
    Recurse(cold, next_depth, path, cold_share * incoming_zero, 0.0,
            node.feature);
  }

  const Tree& tree_;
  const std::vector<double>& values_;
  std::vector<double>& phi_;
  std::vector<PathElement> storage_;
};

void CheckWidth(const model::TreeEnsemble& ensemble,
                const model::PatientRecord& record) {
  if (record.values.size() != ensemble.num_features()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "record has " + std::to_string(record.values.size()) +
                    " values, model expects " +
                    std::to_string(ensemble.num_features()));
  }
}

double SubsetValue(const Tree& tree, std::int32_t index,
                   const std::vector<double>& values,
                   const std::vector<bool>& known) {
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) return node.value;
  if (known[node.feature]) {
    return SubsetValue(tree,
                       values[node.feature] < node.threshold ? node.left
                                                             : node.right,
                       values, known);
  }
  const TreeNode& left = tree.nodes[node.left];
  const TreeNode& right = tree.nodes[node.right];
  return (left.cover * SubsetValue(tree, node.left, values, known) +
          right.cover * SubsetValue(tree, node.right, values, known)) /
         node.cover;
}

}  // namespace

double Attribution::Total() const {
  return std::accumulate(shap_values.begin(), shap_values.end(), base_value);
}

Attribution TreeShap(const model::TreeEnsemble& ensemble,
                     const model::PatientRecord& record) {
  CheckWidth(ensemble, record);
  Attribution attribution;
  attribution.base_value = ensemble.base_margin();
  attribution.shap_values.assign(ensemble.num_features(), 0.0);
  for (const Tree& tree : ensemble.trees()) {
    attribution.base_value += tree.ExpectedValue();
    TreeShapWalker(tree, record.values, attribution.shap_values).Run();
  }
  return attribution;
}

double ConditionalExpectation(const model::TreeEnsemble& ensemble,
                              const model::PatientRecord& record,
                              const std::vector<bool>& known) {
  CheckWidth(ensemble, record);
  double value = ensemble.base_margin();
  for (const Tree& tree : ensemble.trees()) {
    value += SubsetValue(tree, 0, record.values, known);
  }
  return value;
}

Attribution BruteForceShapley(const model::TreeEnsemble& ensemble,
                              const model::PatientRecord& record) {
  CheckWidth(ensemble, record);
  const std::size_t n = ensemble.num_features();
  if (n > kMaxBruteForceFeatures) {
    throw Error(ErrorCode::kTooManyFeatures,
                "brute-force Shapley supports at most 12 features, got " +
                    std::to_string(n));
  }
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> value_of(subsets);
  std::vector<bool> known(n);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    for (std::size_t i = 0; i < n; ++i) known[i] = (mask >> i) & 1U;
    value_of[mask] = ConditionalExpectation(ensemble, record, known);
  }

  // weight[s] = s! (n - s - 1)! / n!
  std::vector<double> factorial(n + 1, 1.0);
  for (std::size_t k = 1; k <= n; ++k) {
    factorial[k] = factorial[k - 1] * static_cast<double>(k);
  }
  Attribution attribution;
  attribution.base_value = value_of[0];
  attribution.shap_values.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      const double weight =
          factorial[size] * factorial[n - size - 1] / factorial[n];
      phi += weight * (value_of[mask | bit] - value_of[mask]);
    }
    attribution.shap_values[i] = phi;
  }
  return attribution;
}

}  // namespace riskx::explain

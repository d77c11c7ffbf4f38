#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskx/model/feature_schema.h"

namespace riskx::model {

// A node of a binary regression tree stored in a flat array. Internal nodes
// send a value to `left` when value < threshold, to `right` otherwise.
struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double cover = 0.0;  // Training rows reaching this node.
  double value = 0.0;  // Leaf output in margin units; unused for splits.

  bool is_leaf() const { return feature == kLeaf; }
};

// Nodes in pre-order; nodes[0] is the root.
struct Tree {
  std::vector<TreeNode> nodes;

  const TreeNode& root() const { return nodes.front(); }
  std::size_t Depth() const;
  double LeafValue(std::span<const double> values) const;
  // Cover-weighted mean of the leaf values.
  double ExpectedValue() const;

  static Tree Leaf(double value, double cover);
};

// Boosted ensemble for binary risk. Learning rate is already folded into the
// leaves and base_margin is in log-odds.
class TreeEnsemble {
 public:
  TreeEnsemble() = default;
  TreeEnsemble(std::vector<Tree> trees, double base_margin,
               std::size_t num_features, std::string schema_version);

  const std::vector<Tree>& trees() const { return trees_; }
  double base_margin() const { return base_margin_; }
  std::size_t num_features() const { return num_features_; }
  const std::string& schema_version() const { return schema_version_; }

  // base_margin + sum of the leaves reached by `values`.
  double Margin(std::span<const double> values) const;

 private:
  std::vector<Tree> trees_;
  double base_margin_ = 0.0;
  std::size_t num_features_ = 0;
  std::string schema_version_;
};

// Structural checks shared by the loader and the trainer: child indices,
// positive covers, cover conservation, finite values and feature indices.
// Throws kCoverMismatch, kFeatureIndexOutOfRange or kMalformedDocument.
void ValidateEnsemble(const TreeEnsemble& ensemble);

// Parses and validates the JSON model format. The schema supplies the
// feature count used for index checks.
TreeEnsemble LoadModel(std::string_view document, const FeatureSchema& schema);
TreeEnsemble LoadModelFile(const std::string& path, const FeatureSchema& schema);

nlohmann::json ModelToJson(const TreeEnsemble& ensemble);
std::string SaveModel(const TreeEnsemble& ensemble);

}  // namespace riskx::model

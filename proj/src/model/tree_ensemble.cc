#include "riskx/model/tree_ensemble.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "riskx/common/error.h"

namespace riskx::model {
namespace {

constexpr int kModelFormatVersion = 1;
constexpr std::size_t kMaxDepth = 64;
constexpr double kCoverTolerance = 1e-9;

using nlohmann::json;

std::size_t DepthFrom(const Tree& tree, std::int32_t index) {
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) return 0;
  return 1 + std::max(DepthFrom(tree, node.left), DepthFrom(tree, node.right));
}

double SubtreeExpectation(const Tree& tree, std::int32_t index) {
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) return node.value;
  const TreeNode& left = tree.nodes[node.left];
  const TreeNode& right = tree.nodes[node.right];
  return (left.cover * SubtreeExpectation(tree, node.left) +
          right.cover * SubtreeExpectation(tree, node.right)) /
         node.cover;
}

[[noreturn]] void Malformed(const std::string& message,
                            const std::string& path) {
  throw Error(ErrorCode::kMalformedDocument, message, path);
}

double RequireNumber(const json& node, const char* key,
                     const std::string& path) {
  const auto it = node.find(key);
  if (it == node.end() || !it->is_number()) {
    Malformed(std::string("expected numeric '") + key + "'",
              path + "/" + key);
  }
  return it->get<double>();
}

void ParseNode(const json& node, const std::string& path, std::size_t depth,
               Tree& tree) {
  if (!node.is_object()) Malformed("tree node must be an object", path);
  if (depth > kMaxDepth) Malformed("tree deeper than 64 levels", path);
  const std::size_t index = tree.nodes.size();
  tree.nodes.emplace_back();
  TreeNode parsed;
  parsed.cover = RequireNumber(node, "cover", path);
  if (node.contains("leaf")) {
    for (const auto& [key, unused] : node.items()) {
      if (key != "leaf" && key != "cover") {
        Malformed("unexpected key '" + key + "' in leaf", path + "/" + key);
      }
    }
    parsed.value = RequireNumber(node, "leaf", path);
    tree.nodes[index] = parsed;
    return;
  }
  for (const auto& [key, unused] : node.items()) {
    if (key != "feature" && key != "threshold" && key != "cover" &&
        key != "left" && key != "right") {
      Malformed("unexpected key '" + key + "' in split", path + "/" + key);
    }
  }
  const auto feature = node.find("feature");
  if (feature == node.end() || !feature->is_number_integer()) {
    Malformed("expected integer 'feature'", path + "/feature");
  }
  if (!feature->is_number_unsigned()) {
    throw Error(ErrorCode::kFeatureIndexOutOfRange,
                "negative feature index", path + "/feature");
  }
  const auto raw_feature = feature->get<std::uint64_t>();
  if (raw_feature > static_cast<std::uint64_t>(INT32_MAX)) {
    throw Error(ErrorCode::kFeatureIndexOutOfRange,
                "feature index too large", path + "/feature");
  }
  parsed.feature = static_cast<std::int32_t>(raw_feature);
  parsed.threshold = RequireNumber(node, "threshold", path);
  if (!node.contains("left") || !node.contains("right")) {
    Malformed("split needs 'left' and 'right'", path);
  }
  parsed.left = static_cast<std::int32_t>(tree.nodes.size());
  ParseNode(node.at("left"), path + "/left", depth + 1, tree);
  parsed.right = static_cast<std::int32_t>(tree.nodes.size());
  ParseNode(node.at("right"), path + "/right", depth + 1, tree);
  tree.nodes[index] = parsed;
}

json NodeToJson(const Tree& tree, std::int32_t index) {
  const TreeNode& node = tree.nodes[index];
  if (node.is_leaf()) return {{"leaf", node.value}, {"cover", node.cover}};
  return {{"feature", node.feature},
          {"threshold", node.threshold},
          {"cover", node.cover},
          {"left", NodeToJson(tree, node.left)},
          {"right", NodeToJson(tree, node.right)}};
}

void ValidateNode(const Tree& tree, std::int32_t index, std::size_t depth,
                  std::size_t num_features, const std::string& path,
                  std::vector<bool>& seen) {
  if (index < 0 || static_cast<std::size_t>(index) >= tree.nodes.size()) {
    Malformed("child index out of range", path);
  }
  if (seen[index]) Malformed("node reachable twice", path);
  if (depth > kMaxDepth) Malformed("tree deeper than 64 levels", path);
  seen[index] = true;
  const TreeNode& node = tree.nodes[index];
  if (!std::isfinite(node.cover) || node.cover <= 0.0) {
    throw Error(ErrorCode::kCoverMismatch, "cover must be positive",
                path + "/cover");
  }
  if (node.is_leaf()) {
    if (!std::isfinite(node.value)) {
      Malformed("leaf value must be finite", path + "/leaf");
    }
    return;
  }
  if (node.feature < 0 ||
      static_cast<std::size_t>(node.feature) >= num_features) {
    throw Error(ErrorCode::kFeatureIndexOutOfRange,
                "feature index " + std::to_string(node.feature) +
                    " outside schema of " + std::to_string(num_features),
                path + "/feature");
  }
  if (!std::isfinite(node.threshold)) {
    Malformed("threshold must be finite", path + "/threshold");
  }
  ValidateNode(tree, node.left, depth + 1, num_features, path + "/left", seen);
  ValidateNode(tree, node.right, depth + 1, num_features, path + "/right",
               seen);
  const double children = tree.nodes[node.left].cover +
                          tree.nodes[node.right].cover;
  if (std::abs(node.cover - children) >
      kCoverTolerance * std::max(1.0, node.cover)) {
    std::ostringstream message;
    message << "cover " << node.cover << " != children " << children;
    throw Error(ErrorCode::kCoverMismatch, message.str(), path + "/cover");
  }
}

}  // namespace

std::size_t Tree::Depth() const { return nodes.empty() ? 0 : DepthFrom(*this, 0); }

double Tree::LeafValue(std::span<const double> values) const {
  std::int32_t index = 0;
  while (!nodes[index].is_leaf()) {
    const TreeNode& node = nodes[index];
    index = values[node.feature] < node.threshold ? node.left : node.right;
  }
  return nodes[index].value;
}

double Tree::ExpectedValue() const { return SubtreeExpectation(*this, 0); }

Tree Tree::Leaf(double value, double cover) {
  Tree tree;
  TreeNode leaf;
  leaf.value = value;
  leaf.cover = cover;
  tree.nodes.push_back(leaf);
  return tree;
}

TreeEnsemble::TreeEnsemble(std::vector<Tree> trees, double base_margin,
                           std::size_t num_features,
                           std::string schema_version)
    : trees_(std::move(trees)),
      base_margin_(base_margin),
      num_features_(num_features),
      schema_version_(std::move(schema_version)) {}

double TreeEnsemble::Margin(std::span<const double> values) const {
  double margin = base_margin_;
  for (const Tree& tree : trees_) margin += tree.LeafValue(values);
  return margin;
}

void ValidateEnsemble(const TreeEnsemble& ensemble) {
  if (!std::isfinite(ensemble.base_margin())) {
    Malformed("base_margin must be finite", "/base_margin");
  }
  for (std::size_t t = 0; t < ensemble.trees().size(); ++t) {
    const Tree& tree = ensemble.trees()[t];
    const std::string path = "/trees/" + std::to_string(t);
    if (tree.nodes.empty()) Malformed("empty tree", path);
    std::vector<bool> seen(tree.nodes.size(), false);
    ValidateNode(tree, 0, 0, ensemble.num_features(), path, seen);
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      Malformed("unreachable nodes", path);
    }
  }
}

TreeEnsemble LoadModel(std::string_view document, const FeatureSchema& schema) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kMalformedDocument,
                "invalid JSON at byte " + std::to_string(e.byte) + ": " +
                    e.what());
  }
  if (!root.is_object()) Malformed("model must be a JSON object", "/");
  const auto version = root.find("version");
  if (version == root.end() || !version->is_number_integer() ||
      version->get<int>() != kModelFormatVersion) {
    Malformed("unsupported model format version", "/version");
  }
  const auto schema_version = root.find("schema_version");
  if (schema_version == root.end() || !schema_version->is_string()) {
    Malformed("expected string 'schema_version'", "/schema_version");
  }
  if (schema_version->get<std::string>() != schema.version()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model built for schema '" +
                    schema_version->get<std::string>() + "', expected '" +
                    schema.version() + "'",
                "/schema_version");
  }
  const double base_margin = RequireNumber(root, "base_margin", "");
  const auto trees_json = root.find("trees");
  if (trees_json == root.end() || !trees_json->is_array()) {
    Malformed("expected array 'trees'", "/trees");
  }
  std::vector<Tree> trees;
  trees.reserve(trees_json->size());
  for (std::size_t t = 0; t < trees_json->size(); ++t) {
    Tree tree;
    ParseNode((*trees_json)[t], "/trees/" + std::to_string(t), 0, tree);
    trees.push_back(std::move(tree));
  }
  TreeEnsemble ensemble(std::move(trees), base_margin, schema.size(),
                        schema.version());
  ValidateEnsemble(ensemble);
  return ensemble;
}

TreeEnsemble LoadModelFile(const std::string& path,
                           const FeatureSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream contents;
  contents << in.rdbuf();
  return LoadModel(contents.str(), schema);
}

json ModelToJson(const TreeEnsemble& ensemble) {
  json trees = json::array();
  for (const Tree& tree : ensemble.trees()) trees.push_back(NodeToJson(tree, 0));
  return {{"version", kModelFormatVersion},
          {"schema_version", ensemble.schema_version()},
          {"base_margin", ensemble.base_margin()},
          {"trees", std::move(trees)}};
}

std::string SaveModel(const TreeEnsemble& ensemble) {
  return ModelToJson(ensemble).dump(1) + "\n";
}

}  // namespace riskx::model

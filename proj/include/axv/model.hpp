#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "axv/box.hpp"
#include "axv/condition.hpp"
#include "axv/template_text.hpp"

namespace axv {

inline constexpr double kDefaultPrior = 0.5;

struct TreeNode;

/// Internal tree node. `prior_true` is the author's probability that the
/// condition holds when the mission state cannot decide it.
struct DecisionNode {
  Condition condition;
  double prior_true = kDefaultPrior;
  Box<TreeNode> true_child;
  Box<TreeNode> false_child;
  bool operator==(const DecisionNode&) const = default;
};

struct ReasonLeaf {
  std::string reason_id;
  TemplateText text;
  bool operator==(const ReasonLeaf&) const = default;
};

/// Path on which the behavior would not fire.
struct NullLeaf {
  bool operator==(const NullLeaf&) const = default;
};

struct TreeNode {
  std::variant<DecisionNode, ReasonLeaf, NullLeaf> node;
  bool operator==(const TreeNode&) const = default;
};

struct GuardConstraint {
  Condition condition;
  double prior_true = kDefaultPrior;
  TemplateText explain;
  bool operator==(const GuardConstraint&) const = default;
};

struct BehaviorSpec {
  std::string id;
  std::vector<std::string> aliases;
  std::vector<GuardConstraint> guards;
  TreeNode tree;
  bool operator==(const BehaviorSpec&) const = default;
};

struct AutonomyModel {
  std::string model_name;
  std::string version;
  std::vector<BehaviorSpec> behaviors;

  const BehaviorSpec* find(std::string_view behavior_id) const;
  bool operator==(const AutonomyModel&) const = default;
};

/// Semantic problem in an otherwise parseable model (duplicate ids/aliases).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses DSL source. Throws ParseError (with line/column) on syntax errors
/// and ModelError on duplicate behavior ids or shared aliases.
AutonomyModel parse_model(std::string_view source);

/// Canonical DSL text. Priors equal to the default are omitted.
std::string serialize_model(const AutonomyModel& model);

enum class Severity { Warning, Error };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;      // e.g. "duplicate-condition"
  std::string behavior;  // behavior id the finding belongs to
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};

/// All semantic findings; empty for a clean model.
std::vector<Diagnostic> validate_model(const AutonomyModel& model);

bool has_errors(const std::vector<Diagnostic>& diagnostics);
std::string to_string(const Diagnostic& d);

/// First leaf (pre-order, true branch first) carrying `reason_id`.
const ReasonLeaf* find_reason_leaf(const TreeNode& tree, std::string_view reason_id);

/// Number of reason leaves in a tree.
std::size_t count_reason_leaves(const TreeNode& tree);
/// Depth in decision nodes along the longest root-to-leaf path.
std::size_t tree_depth(const TreeNode& tree);

}  // namespace axv

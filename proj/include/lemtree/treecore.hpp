#pragma once

#include <string>
#include <vector>

namespace lemtree::treecore {

/// Rooted nonplane binary tree on labels 1..size with labels strictly
/// increasing along every root-to-leaf path. Stored as a parent array; the
/// root is always label 1. The type holds whatever parent data it is given,
/// including data that violates the tree invariants; validate() reports
/// violations instead of failing construction.
class LemnTree {
 public:
  /// parent[i] is the parent label of label i+2 (labels 2..size).
  /// Throws std::invalid_argument if size < 1, the array length is not
  /// size - 1, or any entry is outside 1..size.
  LemnTree(int size, std::vector<int> parent);

  /// The one-node tree.
  static LemnTree single();

  int size() const { return size_; }

  /// Parent label of `label` (2..size); 0 for the root.
  int parent(int label) const;

  /// parent array as stored: entry i is the parent of label i+2.
  const std::vector<int>& parent_array() const { return parent_; }

  /// Child labels of `label`, ascending. May exceed 2 entries for
  /// invariant-violating data.
  std::vector<std::vector<int>> children_lists() const;

  bool operator==(const LemnTree&) const = default;

 private:
  int size_;
  std::vector<int> parent_;
};

struct ValidityReport {
  bool valid = true;
  std::vector<std::string> violations;
};

/// Checks the LemnTree invariants: single root, acyclic/connected parent
/// structure, at most two children per label, child labels strictly larger
/// than their parent's. Violations are data, not errors.
ValidityReport validate(const LemnTree& tree);

struct OutdegreeProfile {
  int n0 = 0;  // leaves
  int n1 = 0;  // one child
  int n2 = 0;  // two children (the branching statistic)
};

/// Exact outdegree counts. Throws std::invalid_argument on an invalid tree.
OutdegreeProfile outdegree_profile(const LemnTree& tree);

/// A permutation of 1..n, validated on construction.
class Permutation {
 public:
  explicit Permutation(std::vector<int> values);
  int size() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& values() const { return values_; }

 private:
  std::vector<int> values_;
};

/// Builds the increasing binary tree of sigma (root at the position of the
/// minimum; left/right subwords generate the subtrees) and forgets the plane
/// embedding. Node labels are the permutation values.
LemnTree tree_from_permutation(const Permutation& sigma);

/// Number of positions i with sigma_i > sigma_{i+1} < sigma_{i+2}
/// (a descent immediately followed by an ascent). Fewer than three entries
/// always yield 0.
int count_valleys(const Permutation& sigma);

/// Canonical string encoding: node := "(" label child* ")" with children
/// ordered by the minimum label of their subtree (which, for a valid tree,
/// is the child's own label). Two valid trees are equal as labeled nonplane
/// trees iff their encodings are equal.
/// Throws std::invalid_argument on an invalid tree.
std::string canonical_encode(const LemnTree& tree);

/// Tree JSON {"size": N, "parent": [p2, ..., pN]}.
std::string tree_to_json(const LemnTree& tree);
LemnTree tree_from_json(const std::string& text);

}  // namespace lemtree::treecore

#include "lemtree/treecore.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace lemtree::treecore {

LemnTree::LemnTree(int size, std::vector<int> parent) : size_(size), parent_(std::move(parent)) {
  if (size_ < 1) throw std::invalid_argument("LemnTree: size must be positive");
  if (static_cast<int>(parent_.size()) != size_ - 1)
    throw std::invalid_argument("LemnTree: parent array must have size-1 entries");
  for (int p : parent_)
    if (p < 1 || p > size_) throw std::invalid_argument("LemnTree: parent label out of range");
}

LemnTree LemnTree::single() { return LemnTree(1, {}); }

int LemnTree::parent(int label) const {
  if (label < 1 || label > size_) throw std::out_of_range("LemnTree::parent: label out of range");
  return label == 1 ? 0 : parent_[label - 2];
}

std::vector<std::vector<int>> LemnTree::children_lists() const {
  std::vector<std::vector<int>> ch(size_ + 1);
  for (int label = 2; label <= size_; ++label) ch[parent_[label - 2]].push_back(label);
  return ch;  // entries already ascending: labels inserted in increasing order
}

ValidityReport validate(const LemnTree& tree) {
  ValidityReport report;
  auto fail = [&](std::string msg) {
    report.valid = false;
    report.violations.push_back(std::move(msg));
  };

  const int n = tree.size();
  std::vector<int> outdeg(n + 1, 0);
  for (int label = 2; label <= n; ++label) {
    int p = tree.parent(label);
    ++outdeg[p];
    if (p >= label)
      fail("child label " + std::to_string(label) + " not larger than parent " + std::to_string(p));
  }
  for (int label = 1; label <= n; ++label)
    if (outdeg[label] > 2)
      fail("label " + std::to_string(label) + " has " + std::to_string(outdeg[label]) + " children");

  // Acyclicity/connectivity: every label must reach the root. With the
  // increasing-label invariant this is automatic, so only report a cycle when
  // it is not already implied by a label-order violation.
  for (int label = 2; label <= n; ++label) {
    int cur = label, steps = 0;
    while (cur != 1 && steps <= n) {
      cur = tree.parent(cur);
      ++steps;
    }
    if (cur != 1) {
      fail("label " + std::to_string(label) + " does not reach the root (cycle)");
      break;
    }
  }
  return report;
}

namespace {

void require_valid(const LemnTree& tree, const char* op) {
  ValidityReport r = validate(tree);
  if (!r.valid)
    throw std::invalid_argument(std::string(op) + ": invalid tree: " + r.violations.front());
}

}  // namespace

OutdegreeProfile outdegree_profile(const LemnTree& tree) {
  require_valid(tree, "outdegree_profile");
  std::vector<int> outdeg(tree.size() + 1, 0);
  for (int label = 2; label <= tree.size(); ++label) ++outdeg[tree.parent(label)];
  OutdegreeProfile p;
  for (int label = 1; label <= tree.size(); ++label) {
    switch (outdeg[label]) {
      case 0: ++p.n0; break;
      case 1: ++p.n1; break;
      default: ++p.n2; break;
    }
  }
  return p;
}

Permutation::Permutation(std::vector<int> values) : values_(std::move(values)) {
  const int n = static_cast<int>(values_.size());
  std::vector<bool> seen(n + 1, false);
  for (int v : values_) {
    if (v < 1 || v > n || seen[v]) throw std::invalid_argument("Permutation: not a bijection on 1..n");
    seen[v] = true;
  }
}

namespace {

// Recursive construction over the subword [lo, hi); parent 0 marks the root.
void build_from_word(const std::vector<int>& word, int lo, int hi, int parent_label,
                     std::vector<int>& parent_out) {
  if (lo >= hi) return;
  int arg_min = lo;
  for (int i = lo + 1; i < hi; ++i)
    if (word[i] < word[arg_min]) arg_min = i;
  int label = word[arg_min];
  if (parent_label != 0) parent_out[label - 2] = parent_label;
  build_from_word(word, lo, arg_min, label, parent_out);
  build_from_word(word, arg_min + 1, hi, label, parent_out);
}

}  // namespace

LemnTree tree_from_permutation(const Permutation& sigma) {
  const int n = sigma.size();
  if (n == 0) throw std::invalid_argument("tree_from_permutation: empty permutation");
  std::vector<int> parent(n - 1, 0);
  build_from_word(sigma.values(), 0, n, 0, parent);
  return LemnTree(n, std::move(parent));
}

int count_valleys(const Permutation& sigma) {
  const auto& v = sigma.values();
  int count = 0;
  for (std::size_t i = 0; i + 2 < v.size(); ++i)
    if (v[i] > v[i + 1] && v[i + 1] < v[i + 2]) ++count;
  return count;
}

namespace {

void encode_node(int label, const std::vector<std::vector<int>>& children, std::string& out) {
  out += '(';
  out += std::to_string(label);
  for (int c : children[label]) encode_node(c, children, out);  // ascending = min-subtree order
  out += ')';
}

}  // namespace

std::string canonical_encode(const LemnTree& tree) {
  require_valid(tree, "canonical_encode");
  auto children = tree.children_lists();
  std::string out;
  out.reserve(static_cast<std::size_t>(tree.size()) * 4);
  encode_node(1, children, out);
  return out;
}

std::string tree_to_json(const LemnTree& tree) {
  nlohmann::ordered_json j;
  j["size"] = tree.size();
  j["parent"] = tree.parent_array();
  return j.dump();
}

LemnTree tree_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  return LemnTree(j.at("size").get<int>(), j.at("parent").get<std::vector<int>>());
}

}  // namespace lemtree::treecore

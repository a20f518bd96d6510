#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "covsys/arith.hpp"
#include "covsys/covering.hpp"
#include "covsys/family.hpp"

namespace covsys {

// A literal prime power, or `@p`: the exponent p currently has on the path.
struct Factor {
  std::uint64_t prime = 0;
  std::uint32_t exponent = 1;
  bool path_ref = false;

  friend bool operator==(const Factor& a, const Factor& b) {
    return a.prime == b.prime && a.path_ref == b.path_ref && (a.path_ref || a.exponent == b.exponent);
  }
};

using FactorList = std::vector<Factor>;

struct Leaf {
  FactorList retained;
  friend bool operator==(const Leaf& a, const Leaf& b) { return a.retained == b.retained; }
};

// The `take` smallest of the 2^k products (subset of `optional`) * base, ascending.
struct Wedge {
  std::vector<FactorList> optional;
  FactorList base;
  std::uint32_t take = 0;
  friend bool operator==(const Wedge& a, const Wedge& b) {
    return a.optional == b.optional && a.base == b.base && a.take == b.take;
  }
};

enum class Termination { Minimal, FullContext };

struct Power {
  std::uint64_t base = 0;
  std::uint32_t start_exponent = 1;
  Termination term = Termination::Minimal;
  friend bool operator==(const Power& a, const Power& b) {
    return a.base == b.base && a.start_exponent == b.start_exponent && a.term == b.term;
  }
};

struct TreeNode;
using NodePtr = std::shared_ptr<const TreeNode>;
using Child = std::variant<Leaf, Wedge, Power, NodePtr>;

struct TreeNode {
  std::uint64_t prime = 0;
  std::vector<Child> children;
};

struct TreeSpec {
  NodePtr root;
  std::optional<std::uint64_t> declared_q;
};

std::uint32_t effective_count(const Child& c);
bool same_shape(const TreeNode& a, const TreeNode& b);
bool operator==(const TreeSpec& a, const TreeSpec& b);

TreeSpec parse_tree(std::string_view text);
std::string print_tree(const TreeSpec& t);
std::string to_dot(const TreeSpec& t);

// The declared q, else the smallest prime above every prime in the tree.
std::uint64_t default_q(const TreeSpec& t);

// Chosen products of a wedge whose tokens are already resolved to literals.
std::vector<FactoredNat> wedge_products(const Wedge& w);

struct ExpandOptions {
  bool merge_identical = true;
  bool force_q = false;
  bool labels = false;
  std::uint64_t max_congruences = 20'000'000;
};

// One congruence per expanded leaf in depth-first order; identical
// congruences are merged unless merge_identical is off.
CoveringSystem expand(const TreeSpec& t, std::uint64_t q, const ExpandOptions& opt = {});

// The same congruence set, with each power branch's copies folded into
// ranged families. Throws Unsupported when q collides with a tree prime or a
// power prime is split again below its own branch.
FamilySystem expand_families(const TreeSpec& t, std::uint64_t q, const ExpandOptions& opt = {});

// Expanded leaves before merging.
Natural raw_leaf_count(const TreeSpec& t, std::uint64_t q);

struct StructuralIssue {
  ErrorKind kind;
  std::string path;
  std::string message;
};

struct StructuralReport {
  std::vector<StructuralIssue> issues;
  std::uint64_t nodes = 0;
  std::uint64_t leaves = 0;
  std::uint64_t power_branches = 0;
  bool passed() const { return issues.empty(); }
  std::string summary() const;
};

StructuralReport structural_verify(const TreeSpec& t, std::uint64_t q, bool force_q = false);

struct SymbolicAuditOptions {
  bool force_q = false;
  // Concrete moduli enumerated where families overlap.
  std::uint64_t overlap_budget = 20'000'000;
  // The full multiplicity map is filled only below this many distinct moduli.
  std::uint64_t multiplicity_cap = 2'000'000;
  // Used when the family form does not apply.
  std::uint64_t expansion_budget = 20'000'000;
};

AuditReport audit_families(const FamilySystem& fs, std::uint64_t designated, const SymbolicAuditOptions& opt = {});
AuditReport symbolic_audit(const TreeSpec& t, std::uint64_t q, std::uint64_t designated,
                           const SymbolicAuditOptions& opt = {});

}  // namespace covsys

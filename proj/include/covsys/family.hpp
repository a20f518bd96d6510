#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "covsys/arith.hpp"
#include "covsys/covering.hpp"

namespace covsys {

// One prime of a congruence family. The exponent i ranges over [lo, hi]; the
// base-p digit at level l < i is prefix[l] for l < prefix.size(), `last` at
// l == i-1 past the prefix, and 0 otherwise. prefix.size() < lo always holds.
struct FamilyComponent {
  std::uint64_t prime = 0;
  std::uint32_t lo = 1;
  std::uint32_t hi = 1;
  std::vector<std::uint32_t> prefix;
  std::uint32_t last = 0;

  static FamilyComponent fixed(std::uint64_t p, std::uint32_t e, const std::vector<std::uint32_t>& digits);

  bool ranged() const { return lo != hi; }
  std::uint32_t digit(std::uint32_t level, std::uint32_t exponent) const {
    if (level < prefix.size()) return prefix[level];
    return level + 1 == exponent ? last : 0;
  }
  Natural residue(std::uint32_t exponent) const;

  friend bool operator==(const FamilyComponent& a, const FamilyComponent& b) {
    return a.prime == b.prime && a.lo == b.lo && a.hi == b.hi && a.prefix == b.prefix && a.last == b.last;
  }
};

// The product set of its components' exponent choices, one congruence each.
struct CongruenceFamily {
  std::vector<FamilyComponent> comps;  // sorted by prime
  std::string label;

  std::uint64_t size() const;
  std::vector<std::uint64_t> primes() const;
  Congruence member(const std::vector<std::uint32_t>& exponents) const;

  friend bool operator==(const CongruenceFamily& a, const CongruenceFamily& b) { return a.comps == b.comps; }
};

struct FamilyHash {
  std::size_t operator()(const CongruenceFamily& f) const;
};

class FamilySystem {
 public:
  FamilySystem() = default;
  static FamilySystem from_system(const CoveringSystem& s);

  void add(CongruenceFamily f);
  // Drops families equal to an earlier one.
  void merge_identical();

  const std::vector<CongruenceFamily>& families() const { return families_; }
  std::size_t family_count() const { return families_.size(); }
  // Members counted with repetition across families.
  std::uint64_t member_count() const;
  FactoredNat lcm() const;

  // Distinct members in family order; throws ResourceBudgetExceeded past max_congruences.
  CoveringSystem materialize(std::uint64_t max_congruences) const;

 private:
  std::vector<CongruenceFamily> families_;
};

}  // namespace covsys

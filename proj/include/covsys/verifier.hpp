#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "covsys/arith.hpp"
#include "covsys/covering.hpp"
#include "covsys/family.hpp"

namespace covsys {

enum class Verdict { Covered, NotCovered };

struct VerifyStats {
  std::uint64_t classes_explored = 0;
  std::uint64_t memo_hits = 0;
  std::uint32_t max_depth = 0;
  double elapsed_seconds = 0;
};

struct CoverReport {
  Verdict verdict = Verdict::Covered;
  std::optional<ResidueClass> witness_class;
  std::optional<Natural> witness_integer;
  std::optional<FactoredNat> lcm;
  VerifyStats stats;

  bool covered() const { return verdict == Verdict::Covered; }
};

enum class SplitOrder {
  SmallestPrime,      // smallest prime some relevant modulus still needs
  FewestUnsatisfied,  // a prime of the congruence closest to containing the class
};

struct SplitOptions {
  std::uint64_t class_budget = 100'000'000;
  SplitOrder order = SplitOrder::SmallestPrime;
  bool memoize = true;
  // Memo storage cap in 32-bit words.
  std::uint64_t memo_words = 64'000'000;
};

constexpr std::uint64_t kDefaultBruteLimit = 200'000'000;

CoverReport brute_force_verify(const CoveringSystem& s, const Natural& limit = kDefaultBruteLimit);

CoverReport split_verify(const CoveringSystem& s, const SplitOptions& opt = {});
CoverReport split_verify(const FamilySystem& s, const SplitOptions& opt = {});

Rational uncovered_measure(const CoveringSystem& s, const SplitOptions& opt = {});
Rational uncovered_measure(const FamilySystem& s, const SplitOptions& opt = {});

// Index of the first congruence containing x, or -1.
long first_covering(const CoveringSystem& s, const Natural& x);

std::string describe(const CoverReport& r);

}  // namespace covsys

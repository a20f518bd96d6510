#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "covsys/verifier.hpp"

using namespace covsys;

namespace {

const char* kTenCongruences =
    "1 % 2\n1 % 3\n2 % 2*3\n3 % 3^2\n0 % 5\n6 % 2*5\n12 % 3*5\n18 % 2*3*5\n9 % 3^2*5\n24 % 2*3^2*5\n";

CoveringSystem sys(const std::string& text) { return parse_system(text); }

// Membership oracle: x is uncovered iff no congruence holds by direct remainder.
bool uncovered(const CoveringSystem& s, const Natural& x) { return first_covering(s, x) < 0; }

// Independent oracle: fraction of [0, L) left uncovered.
Rational uncovered_fraction(const CoveringSystem& s) {
  std::uint64_t L = to_u64(s.lcm().value());
  std::uint64_t miss = 0;
  for (std::uint64_t x = 0; x < L; ++x) {
    bool hit = false;
    for (auto& c : s.congruences()) {
      if (x % to_u64(c.modulus().value()) == to_u64(c.residue())) {
        hit = true;
        break;
      }
    }
    if (!hit) ++miss;
  }
  Rational r(from_u64(miss), from_u64(L));
  r.canonicalize();
  return r;
}

CoveringSystem random_system(std::mt19937_64& rng) {
  static std::vector<std::uint64_t> divisors;
  if (divisors.empty()) {
    for (std::uint64_t d = 2; d <= 1512; ++d) {
      if (1512 * 5 * 7 % d == 0 || 1512 % d == 0) {
        if ((2 * 2 * 2 * 3 * 3 * 3 * 5 * 7) % d == 0) divisors.push_back(d);
      }
    }
    for (std::uint64_t d = 1513; d <= 7560; ++d) {
      if (7560 % d == 0) divisors.push_back(d);
    }
  }
  CoveringSystem s;
  std::size_t n = 1 + rng() % 40;
  // Bias toward small moduli so a fair share of systems cover.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = std::min({rng() % divisors.size(), rng() % divisors.size(), rng() % divisors.size()});
    std::uint64_t d = divisors[k];
    s.add(Congruence(from_u64(rng() % d), factor(d)));
  }
  return s;
}

}  // namespace

TEST_CASE("brute force on the ten-congruence example") {
  CoverReport r = brute_force_verify(sys(kTenCongruences), 1000000000);
  CHECK(r.covered());
  CHECK(r.lcm->value() == 90);
}

TEST_CASE("brute force finds the least uncovered residue") {
  CoverReport r = brute_force_verify(sys(std::string(kTenCongruences).substr(0, std::string(kTenCongruences).rfind("24 %"))));
  CHECK_FALSE(r.covered());
  CHECK(*r.witness_integer == 24);
  CoverReport t = brute_force_verify(sys("0 % 2\n"));
  CHECK(*t.witness_integer == 1);
}

TEST_CASE("brute force refuses large lcm") {
  try {
    brute_force_verify(sys("0 % 2\n0 % 3^30\n"), 1000);
    FAIL("expected LcmExceedsLimit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LcmExceedsLimit);
  }
}

TEST_CASE("split_verify examples") {
  CHECK(split_verify(sys(kTenCongruences)).covered());
  CoverReport r = split_verify(sys("1 % 3\n2 % 3\n"));
  CHECK_FALSE(r.covered());
  CHECK(*r.witness_integer == 0);
  CoverReport e = split_verify(CoveringSystem{});
  CHECK_FALSE(e.covered());
  CHECK(*e.witness_integer == 0);
}

TEST_CASE("split_verify witness is checkable") {
  CoveringSystem s = sys(std::string(kTenCongruences).substr(0, std::string(kTenCongruences).rfind("24 %")));
  CoverReport r = split_verify(s);
  REQUIRE_FALSE(r.covered());
  CHECK(uncovered(s, *r.witness_integer));
  CHECK(r.witness_class->contains(*r.witness_integer));
  CHECK(*r.witness_integer == 24);
}

TEST_CASE("universal congruence short-circuits") {
  CoveringSystem s;
  s.add(Congruence(Natural(0), FactoredNat{}));
  s.add(parse_congruence("1 % 7"));
  CoverReport r = split_verify(s);
  CHECK(r.covered());
  CHECK(r.stats.classes_explored == 1);
}

TEST_CASE("split_verify handles huge moduli") {
  CoveringSystem s = sys("1 % 2\n0 % 2^200\n");
  for (int i = 1; i < 200; ++i) {
    Natural r = pow_u64(2, static_cast<std::uint32_t>(i));
    s.add(Congruence(r, FactoredNat::prime_power(2, static_cast<std::uint32_t>(i + 1))));
  }
  CHECK(split_verify(s).covered());
  CoveringSystem t = sys("1 % 2\n");
  for (int i = 1; i < 200; ++i) {
    Natural r = pow_u64(2, static_cast<std::uint32_t>(i));
    t.add(Congruence(r, FactoredNat::prime_power(2, static_cast<std::uint32_t>(i + 1))));
  }
  CoverReport r = split_verify(t);
  CHECK_FALSE(r.covered());
  CHECK(*r.witness_integer == 0);
  CHECK(r.witness_class->modulus() == FactoredNat::prime_power(2, 200));
}

TEST_CASE("class budget is enforced") {
  SplitOptions o;
  o.class_budget = 5;
  o.memoize = false;
  try {
    split_verify(sys(kTenCongruences), o);
    FAIL("expected budget error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResourceBudgetExceeded);
  }
}

TEST_CASE("uncovered measure examples") {
  CHECK(uncovered_measure(sys("0 % 2\n")) == Rational(1, 2));
  CHECK(uncovered_measure(sys(kTenCongruences)) == 0);
  CHECK(uncovered_measure(sys(std::string(kTenCongruences).substr(0, std::string(kTenCongruences).rfind("24 %")))) == Rational(1, 90));
}

TEST_CASE("oracle equivalence on 1000 random systems") {
  std::mt19937_64 rng(20240601);
  int covered = 0;
  for (int t = 0; t < 1000; ++t) {
    CoveringSystem s = random_system(rng);
    CoverReport b = brute_force_verify(s);
    for (SplitOrder order : {SplitOrder::SmallestPrime, SplitOrder::FewestUnsatisfied}) {
      for (bool memo : {true, false}) {
        SplitOptions o;
        o.order = order;
        o.memoize = memo;
        CoverReport r = split_verify(s, o);
        REQUIRE(r.verdict == b.verdict);
        if (!r.covered()) {
          CHECK(uncovered(s, *r.witness_integer));
          CHECK(r.witness_class->contains(*r.witness_integer));
          CHECK(uncovered(s, *b.witness_integer));
        }
      }
    }
    covered += b.covered();
    if (t % 10 == 0) CHECK(uncovered_measure(s) == uncovered_fraction(s));
  }
  MESSAGE("covered systems: " << covered);
  CHECK(covered >= 100);
}

TEST_CASE("adding a congruence is monotone") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 200; ++t) {
    CoveringSystem s = random_system(rng);
    Rational before = uncovered_measure(s);
    bool was = split_verify(s).covered();
    CoveringSystem u = s;
    std::uint64_t m = 2 + rng() % 40;
    FactoredNat f = factor(m);
    u.add(Congruence(from_u64(rng() % m), f));
    Rational after = uncovered_measure(u);
    CHECK(after <= before);
    if (was) CHECK(split_verify(u).covered());
  }
}

TEST_CASE("verdict is independent of order") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 200; ++t) {
    CoveringSystem s = random_system(rng);
    bool base = split_verify(s).covered();
    std::vector<Congruence> cs = s.congruences();
    std::shuffle(cs.begin(), cs.end(), rng);
    CoveringSystem u(cs);
    CoverReport r = split_verify(u);
    CHECK(r.covered() == base);
    if (!r.covered()) CHECK(uncovered(u, *r.witness_integer));
  }
}

TEST_CASE("family members behave like their materialization") {
  FamilySystem fs;
  CongruenceFamily f;
  FamilyComponent c;
  c.prime = 3;
  c.lo = 1;
  c.hi = 4;
  c.last = 1;
  f.comps.push_back(c);
  fs.add(f);
  CoveringSystem m = fs.materialize(100);
  CHECK(serialize_system(m) == "1 % 3\n3 % 3^2\n9 % 3^3\n27 % 3^4\n");
  CHECK(split_verify(fs).covered() == split_verify(m).covered());
  CHECK(uncovered_measure(fs) == uncovered_measure(m));
  CHECK(uncovered_measure(fs) == Rational(41, 81));
}

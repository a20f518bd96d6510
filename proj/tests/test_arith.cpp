#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "covsys/arith.hpp"

using namespace covsys;

namespace {

FactoredNat fn(std::vector<FactoredNat::Entry> f) { return FactoredNat::from_factors(std::move(f)); }

ResidueClass cls(long r, std::vector<FactoredNat::Entry> m) {
  return ResidueClass::from_congruence(Congruence(Natural(r), fn(std::move(m))));
}

std::vector<bool> sieve(std::uint64_t n) {
  std::vector<bool> comp(n + 1, false);
  comp[0] = comp[1] = true;
  for (std::uint64_t i = 2; i * i <= n; ++i) {
    if (!comp[i]) {
      for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = true;
    }
  }
  return comp;
}

}  // namespace

TEST_CASE("primality agrees with a sieve below 10^6") {
  auto comp = sieve(1000000);
  for (std::uint64_t n = 0; n <= 1000000; ++n) CHECK_MESSAGE(is_prime(n) == !comp[n], n);
}

TEST_CASE("primality on large values") {
  CHECK(is_prime(std::uint64_t{18446744073709551557ULL}));
  CHECK_FALSE(is_prime(std::uint64_t{3215031751ULL}));  // strong pseudoprime to bases 2,3,5,7
  CHECK_FALSE(is_prime(std::uint64_t{18446744073709551615ULL}));
  Natural big("170141183460469231731687303715884105727");  // 2^127 - 1
  CHECK(is_prime(big));
  CHECK_FALSE(is_prime(Natural(big * 3)));
}

TEST_CASE("factor examples") {
  CHECK(factor(std::uint64_t{90}) == fn({{2, 1}, {3, 2}, {5, 1}}));
  CHECK(factor(std::uint64_t{1}).is_one());
  CHECK(factor(std::uint64_t{25515}) == fn({{3, 6}, {5, 1}, {7, 1}}));
  CHECK(factor(Natural("340282366920938463463374607431768211456")) == fn({{2, 128}}));
}

TEST_CASE("factor round-trips for every n up to 10^6") {
  auto comp = sieve(1000000);
  for (std::uint64_t n = 1; n <= 1000000; ++n) {
    FactoredNat f = factor(n);
    std::uint64_t v = 1;
    for (auto& [p, e] : f.factors()) {
      REQUIRE(!comp[p]);
      for (std::uint32_t i = 0; i < e; ++i) v *= p;
    }
    REQUIRE(v == n);
    REQUIRE(f.value_u64() == n);
    REQUIRE(factor(f.value()) == f);
  }
}

TEST_CASE("factored naturals order by value") {
  CHECK(fn({{2, 3}}) < fn({{3, 2}}));
  CHECK(fn({{7, 1}}) < fn({{2, 3}}));
  CHECK_FALSE(fn({{3, 2}}) < fn({{3, 2}}));
  CHECK(fn({{23, 22}}) < fn({{2, 100}}));
  CHECK(fn({{2, 1}, {3, 1}}).to_string() == "2*3");
  CHECK(fn({{3, 2}, {2, 1}, {5, 1}}).to_string() == "2*3^2*5");
  CHECK_THROWS_AS(fn({{6, 1}}), Error);
}

TEST_CASE("crt_combine examples") {
  auto c = crt_combine({{Natural(0), fn({{2, 1}})}, {Natural(6), fn({{3, 2}})}, {Natural(4), fn({{5, 1}})}});
  CHECK(c.residue() == 24);
  CHECK(c.modulus() == fn({{2, 1}, {3, 2}, {5, 1}}));
  auto d = crt_combine({{Natural(0), fn({{3, 2}})}, {Natural(4), fn({{5, 1}})}});
  CHECK(d.residue() == 9);
  CHECK(d.modulus().value() == 45);
  auto e = crt_combine({{Natural(7), fn({{3, 2}})}});
  CHECK(e.residue() == 7);
  CHECK_THROWS_AS(crt_combine({{Natural(1), fn({{3, 1}})}, {Natural(2), fn({{3, 2}})}}), Error);
}

TEST_CASE("crt_combine output satisfies every part") {
  std::mt19937_64 rng(7);
  const std::uint64_t ps[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
  for (int t = 0; t < 500; ++t) {
    std::vector<std::pair<Natural, FactoredNat>> parts;
    for (auto p : ps) {
      if (rng() % 2) continue;
      std::uint32_t e = 1 + rng() % 6;
      Natural pe = pow_u64(p, e);
      Natural r = from_u64(rng()) % pe;
      parts.emplace_back(r, FactoredNat::prime_power(p, e));
    }
    Congruence c = crt_combine(parts);
    for (auto& [r, m] : parts) CHECK(Natural(c.residue() % m.value()) == r);
  }
}

TEST_CASE("class_relation examples") {
  CHECK(class_relation(cls(2, {{2, 1}, {3, 1}}), cls(2, {{3, 1}})) == Relation::SubsetOfB);
  CHECK(class_relation(cls(1, {{2, 1}}), cls(0, {{2, 1}})) == Relation::Disjoint);
  CHECK(class_relation(cls(0, {{2, 1}, {3, 1}}), cls(3, {{3, 2}})) == Relation::ProperOverlap);
  CHECK(class_relation(cls(2, {{3, 1}}), cls(2, {{2, 1}, {3, 1}})) == Relation::SupersetOfB);
  CHECK(class_relation(cls(4, {{5, 1}}), cls(4, {{5, 1}})) == Relation::Equal);
  CHECK(class_relation(ResidueClass::universal(), cls(1, {{2, 1}})) == Relation::SupersetOfB);
}

TEST_CASE("class_relation agrees with membership sampling") {
  std::mt19937_64 rng(11);
  const std::uint64_t ps[] = {2, 3, 5};
  auto random_class = [&]() {
    std::vector<ResidueClass::Component> comps;
    for (auto p : ps) {
      std::uint32_t e = rng() % 3;
      if (e == 0) continue;
      Natural pe = pow_u64(p, e);
      comps.push_back({p, e, Natural(from_u64(rng()) % pe)});
    }
    return ResidueClass::from_components(comps);
  };
  for (int t = 0; t < 300; ++t) {
    ResidueClass a = random_class(), b = random_class();
    Relation r = class_relation(a, b);
    Relation back = class_relation(b, a);
    if (r == Relation::SubsetOfB) CHECK(back == Relation::SupersetOfB);
    if (r == Relation::SupersetOfB) CHECK(back == Relation::SubsetOfB);
    if (r == Relation::Disjoint || r == Relation::Equal || r == Relation::ProperOverlap) CHECK(back == r);
    // Sample 200 members of a and test them against b.
    Congruence ca = a.to_congruence();
    Natural ma = ca.modulus().value();
    bool all_in_b = true, some_in_b = false;
    for (int k = 0; k < 200; ++k) {
      Natural x = ca.residue() + ma * from_u64(rng() % 1000);
      bool in = b.contains(x);
      all_in_b = all_in_b && in;
      some_in_b = some_in_b || in;
    }
    if (r == Relation::SubsetOfB || r == Relation::Equal) CHECK(all_in_b);
    if (!all_in_b) CHECK(r != Relation::SubsetOfB);
    if (r == Relation::Disjoint) CHECK_FALSE(some_in_b);
    // Exhaustive check over one period.
    bool a_sub_b = true, b_sub_a = true, meet = false;
    for (long x = 0; x < 900; ++x) {
      bool ia = a.contains(Natural(x)), ib = b.contains(Natural(x));
      if (ia && !ib) a_sub_b = false;
      if (ib && !ia) b_sub_a = false;
      if (ia && ib) meet = true;
    }
    Relation expect = !meet ? Relation::Disjoint
                      : a_sub_b && b_sub_a ? Relation::Equal
                      : a_sub_b ? Relation::SubsetOfB
                      : b_sub_a ? Relation::SupersetOfB
                      : Relation::ProperOverlap;
    CHECK(r == expect);
  }
}

TEST_CASE("split_class examples") {
  auto s = split_class(ResidueClass::universal(), 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0].to_string() == "0 % 2");
  CHECK(s[1].to_string() == "1 % 2");
  auto t = split_class(cls(0, {{3, 1}}), 3);
  CHECK(t[0].to_string() == "0 % 3^2");
  CHECK(t[1].to_string() == "3 % 3^2");
  CHECK(t[2].to_string() == "6 % 3^2");
  auto u = split_class(cls(1, {{2, 1}}), 3);
  CHECK(u[0].to_string() == "3 % 2*3");
  CHECK(u[1].to_string() == "1 % 2*3");
  CHECK(u[2].to_string() == "5 % 2*3");
}

TEST_CASE("split_class partitions its input") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    ResidueClass c = cls(static_cast<long>(rng() % 12), {{2, 2}, {3, 1}});
    std::uint64_t p = (t % 3 == 0) ? 2 : (t % 3 == 1 ? 3 : 5);
    auto parts = split_class(c, p);
    REQUIRE(parts.size() == p);
    Rational sum = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      CHECK(class_relation(parts[i], c) == Relation::SubsetOfB);
      CHECK(parts[i].exponent(p) == c.exponent(p) + 1);
      sum += Rational(1, 1) / Rational(parts[i].modulus().value());
      for (std::size_t j = i + 1; j < parts.size(); ++j) CHECK(class_relation(parts[i], parts[j]) == Relation::Disjoint);
    }
    CHECK(sum == Rational(1, 1) / Rational(c.modulus().value()));
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "covsys/covering.hpp"

using namespace covsys;

namespace {

const char* kTenCongruences =
    "1 % 2\n1 % 3\n2 % 2*3\n3 % 3^2\n0 % 5\n6 % 2*5\n12 % 3*5\n18 % 2*3*5\n9 % 3^2*5\n24 % 2*3^2*5\n";

FactoredNat fn(std::vector<FactoredNat::Entry> f) { return FactoredNat::from_factors(std::move(f)); }

}  // namespace

TEST_CASE("parse single lines") {
  Congruence c = parse_congruence("24 % 2*3^2*5");
  CHECK(c.residue() == 24);
  CHECK(c.modulus() == fn({{2, 1}, {3, 2}, {5, 1}}));
  Congruence d = parse_congruence("3 % 9");
  CHECK(d.modulus() == fn({{3, 2}}));
  Congruence e = parse_congruence("  7 %   5^1 * 3 ");
  CHECK(e.to_string() == "7 % 3*5");
  CHECK(parse_congruence("5 % 4*3").to_string() == "5 % 2^2*3");
  CHECK(parse_congruence("3 % 2*2").to_string() == "3 % 2^2");
}

TEST_CASE("parse errors carry kind and position") {
  try {
    parse_system("1 % 2\n5 % 4*6\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPrimeFactor);
    CHECK(e.line() == 2);
    CHECK(e.column() == 7);
  }
  try {
    parse_system("1 % 2\n\n3 % 2 junk\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SyntaxError);
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_system("5 % 3\n"), Error);
  try {
    parse_system("0 % 1\n");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ModulusOne);
  }
  try {
    parse_system("5 % 5\n");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResidueOutOfRange);
  }
}

TEST_CASE("comments and blank lines are ignored") {
  CoveringSystem s = parse_system("# header\n\n1 % 2 # odd\n   \n0 % 2\n");
  REQUIRE(s.size() == 2);
  CHECK(serialize_system(s) == "1 % 2\n0 % 2\n");
}

TEST_CASE("serialize and parse round-trip") {
  CoveringSystem s = parse_system(kTenCongruences);
  CHECK(serialize_system(s) == kTenCongruences);
  CHECK(parse_system(serialize_system(s)) == s);
  CoveringSystem t = parse_system("24 %   5*3^2*2\n");
  CHECK(serialize_system(t) == "24 % 2*3^2*5\n");
}

TEST_CASE("structured format round-trip") {
  CoveringSystem s = parse_system(kTenCongruences);
  std::string doc = serialize_structured(s);
  CHECK(doc.find("\"24\"") != std::string::npos);
  CHECK(parse_structured(doc) == s);
  CHECK(parse_any(doc) == s);
  CHECK(parse_structured(R"({"congruences":[{"residue":"24","modulus":{"2":1,"3":2,"5":1}}]})")[0].to_string() ==
        "24 % 2*3^2*5");
  CHECK_THROWS_AS(parse_structured(R"({"congruences":[{"residue":"1","modulus":{"4":1}}]})"), Error);
  CHECK_THROWS_AS(parse_structured("{"), Error);
}

TEST_CASE("audit of the ten-congruence example") {
  AuditReport r = audit(parse_system(kTenCongruences), 7);
  CHECK_FALSE(r.all_odd);
  CHECK(r.distinct_except.empty());
  CHECK(r.designated_prime_count == 0);
  CHECK(r.congruence_count == 10);
  CHECK(r.distinct_moduli == 10);
  CHECK_FALSE(r.all_square_free);
}

TEST_CASE("audit counts repeated moduli") {
  AuditReport r = audit(parse_system("0 % 3\n0 % 3\n"), 3);
  CHECK(r.multiplicity.size() == 1);
  CHECK(r.multiplicity.at(fn({{3, 1}})) == 2);
  CHECK(r.distinct_except.at(fn({{3, 1}})) == 2);
  CHECK(r.designated_prime_count == 2);
  CHECK(r.distinct_apart_from_designated());
}

TEST_CASE("audit is invariant under permutation") {
  std::mt19937_64 rng(5);
  CoveringSystem s = parse_system(kTenCongruences + std::string("0 % 3\n5 % 3^2\n"));
  AuditReport base = audit(s, 3);
  std::uint64_t total = 0;
  for (auto& [m, n] : base.multiplicity) total += n;
  CHECK(total == s.size());
  for (int t = 0; t < 20; ++t) {
    std::vector<Congruence> cs = s.congruences();
    std::shuffle(cs.begin(), cs.end(), rng);
    AuditReport r = audit(CoveringSystem(cs), 3);
    CHECK(r.multiplicity == base.multiplicity);
    CHECK(r.distinct_except == base.distinct_except);
    CHECK(r.designated_prime_count == base.designated_prime_count);
  }
}

TEST_CASE("density") {
  DensityReport d = density(parse_system(kTenCongruences));
  CHECK(d.harmonic_sum == Rational(139, 90));
  CHECK(d.lcm.value() == 90);
  DensityReport e = density(parse_system("0 % 2\n1 % 2\n"));
  CHECK(e.harmonic_sum == 1);
  CHECK(e.lcm.value() == 2);
}

TEST_CASE("density ignores residues") {
  std::mt19937_64 rng(9);
  CoveringSystem s = parse_system(kTenCongruences);
  Rational base = density(s).harmonic_sum;
  for (int t = 0; t < 50; ++t) {
    CoveringSystem u;
    for (auto& c : s.congruences()) u.add(Congruence(from_u64(rng()) % c.modulus().value(), c.modulus()));
    CHECK(density(u).harmonic_sum == base);
  }
}

TEST_CASE("labels are excluded from equality") {
  CoveringSystem a, b;
  a.add(parse_congruence("1 % 2"), "root/0");
  b.add(parse_congruence("1 % 2"));
  CHECK(a == b);
  CHECK(a.label(0) == "root/0");
  CHECK(b.label(0).empty());
}

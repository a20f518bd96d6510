#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "covsys/constructions.hpp"
#include "covsys/transforms.hpp"
#include "covsys/verifier.hpp"
#include "random_trees.hpp"

using namespace covsys;

namespace {

CoveringSystem sys(const std::string& text) { return parse_system(text); }

std::map<FactoredNat, std::uint64_t> moduli(const CoveringSystem& s) {
  std::map<FactoredNat, std::uint64_t> out;
  for (auto& c : s.congruences()) ++out[c.modulus()];
  return out;
}

ErrorKind error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoError;
}

FactoredNat fm(std::initializer_list<FactoredNat::Entry> e) { return FactoredNat::from_factors(e); }

}  // namespace

TEST_CASE("swap on the three congruence example") {
  auto s = sys("1 % 2\n0 % 2^2\n2 % 2^2\n");
  auto out = swap_residues(s, 2, 1, 0);
  CHECK(serialize_system(out) == "0 % 2\n1 % 2^2\n3 % 2^2\n");
  CHECK(brute_force_verify(s).covered());
  CHECK(brute_force_verify(out).covered());
  CHECK(serialize_system(swap_residues(out, 2, 0, 1)) == serialize_system(s));
}

TEST_CASE("swap preconditions") {
  CHECK(error_of([] { swap_residues(sys("0 % 2\n1 % 2\n"), 3, 0, 1); }) == ErrorKind::PreconditionViolated);
  CHECK(error_of([] { swap_residues(sys("0 % 3\n1 % 3\n2 % 3\n"), 3, 0, 1); }) == ErrorKind::PreconditionViolated);
  CHECK(error_of([] { swap_residues(sys("0 % 3\n"), 3, 0, 3); }) == ErrorKind::PreconditionViolated);
  CHECK(error_of([] { swap_residues(sys("0 % 3\n"), 3, 0, 0); }) == ErrorKind::PreconditionViolated);
}

TEST_CASE("swap on 500 random coverings") {
  testutil::TreeGenOptions opt;
  opt.root_prime_leaf = true;
  opt.max_depth = 2;
  testutil::TreeGen gen(20261015, opt);
  std::mt19937_64 rng(7);
  int done = 0;
  while (done < 500) {
    auto t = gen.tree();
    auto s = expand(t, 7);
    if (s.lcm().value() > 10000) continue;
    std::uint64_t p = t.root->prime;
    std::vector<std::uint64_t> present, absent;
    for (std::uint64_t r = 0; r < p; ++r) {
      bool has = false;
      for (auto& c : s.congruences()) has = has || c.modulus() == FactoredNat::prime_power(p, 1) && c.residue() == r;
      (has ? present : absent).push_back(r);
    }
    if (absent.empty()) continue;
    auto r1 = present[rng() % present.size()];
    auto r2 = absent[rng() % absent.size()];
    CAPTURE(print_tree(t));
    auto out = swap_residues(s, p, r1, r2);
    CHECK(moduli(out) == moduli(s));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.congruences()[i].modulus().has_prime(p)) CHECK(out.congruences()[i] == s.congruences()[i]);
    }
    CHECK(serialize_system(swap_residues(out, p, r2, r1)) == serialize_system(s));
    CHECK(brute_force_verify(out).covered());
    ++done;
  }
}

TEST_CASE("lift example") {
  auto c0 = sys("0 % 3\n1 % 3\n2 % 3*5\n5 % 3*5\n8 % 3*5\n11 % 3*5\n14 % 3*5\n");
  REQUIRE(brute_force_verify(c0).covered());
  auto r = lift_squarefree(c0, 3);
  CHECK(r.q == 7);
  CHECK(r.system.size() == 43);
  auto v = brute_force_verify(r.system);
  CHECK(v.covered());
  CHECK(v.lcm->value() == 25515);
  REQUIRE(r.intermediates.size() == 1);
  auto& c2 = r.intermediates.at(2);
  std::set<Natural> residues;
  for (auto& c : c2.congruences()) {
    CHECK(c.modulus().value() == 5);
    residues.insert(c.residue());
  }
  CHECK(residues == std::set<Natural>{0, 1, 2, 3, 4});
  for (auto& [xi, cx] : r.intermediates) CHECK(brute_force_verify(cx).covered());

  // Index ranges: i = 0..q-2 for the p-powers and r terms, i = 0..q-1 for s_i.
  std::map<FactoredNat, std::uint64_t> want;
  for (std::uint32_t i = 0; i + 2 <= r.q; ++i) ++want[FactoredNat::prime_power(3, i + 1)];
  for (std::uint32_t i = 0; i < r.q; ++i) ++want[fm({{3, i}, {7, 1}})];
  for (std::uint32_t i = 0; i + 2 <= r.q; ++i) want[fm({{3, i + 1}, {5, 1}})] += 5;
  CHECK(moduli(r.system) == want);

  CHECK(error_of([&] { lift_squarefree(c0, 3, 5); }) == ErrorKind::PreconditionViolated);
  CHECK(error_of([&] { lift_squarefree(c0, 3, 9); }) == ErrorKind::PreconditionViolated);
  auto r11 = lift_squarefree(c0, 3, 11);
  CHECK(r11.system.size() == 10 + 11 + 50);
  CHECK(split_verify(r11.system).covered());
}

TEST_CASE("lift pre-swaps the two modulus-p congruences") {
  auto c0 = sys("1 % 3\n2 % 3\n0 % 3*5\n3 % 3*5\n6 % 3*5\n9 % 3*5\n12 % 3*5\n");
  REQUIRE(brute_force_verify(c0).covered());
  auto r = lift_squarefree(c0, 3);
  auto zero = Congruence(0, FactoredNat::prime_power(3, 1));
  auto one = Congruence(1, FactoredNat::prime_power(3, 1));
  bool has0 = false, has1 = false;
  for (auto& c : r.normalized.congruences()) {
    has0 = has0 || c == zero;
    has1 = has1 || c == one;
  }
  CHECK((has0 && has1));
  CHECK(r.system.size() == 43);
  CHECK(brute_force_verify(r.system).covered());
}

TEST_CASE("lift with p-free congruences") {
  // 0 mod 2 is p-free; the 3-part only has to cover the odd integers.
  auto c0 = sys("0 % 2\n0 % 3\n1 % 3\n5 % 2*3\n");
  REQUIRE(brute_force_verify(c0).covered());
  auto r = lift_squarefree(c0, 3);
  CHECK(r.q == 5);
  CHECK(r.system.size() == 4 + 5 + 1 + 4);
  CHECK(brute_force_verify(r.system).covered());
  CHECK(error_of([] { lift_squarefree(sys("0 % 3\n1 % 3\n2 % 3^2\n5 % 3^2\n8 % 3^2\n"), 3); }) ==
        ErrorKind::StructureMismatch);
}

TEST_CASE("root swap on six sevens") {
  auto t = root_swap_coprime(six_sevens_tree(), 11);
  CHECK(t.root->prime == 11);
  CHECK(structural_verify(t, 29).passed());
  auto s = expand(t, 29);
  CHECK(s.size() == 143);
  CHECK(split_verify(s).covered());
  auto a = audit(s, 11);
  CHECK(a.designated_prime_count == 10);
  CHECK(a.distinct_apart_from_designated());
  CHECK(a.all_odd);
  CHECK(a.all_square_free);
  CHECK(error_of([] { root_swap_coprime(six_sevens_tree(), 7); }) == ErrorKind::QNotGreater);
  CHECK(error_of([] { root_swap_coprime(six_sevens_tree(), 15); }) == ErrorKind::NonPrime);
}

TEST_CASE("root swap on a small tree") {
  auto t = parse_tree(R"(
node 3 {
  leaf [3];
  node 2 { leaf [2*3]; node 2 { leaf [2^2*3]; leaf [2^2*3]; } }
  node 2 { leaf [2*3]; leaf [2*3]; }
})");
  REQUIRE(brute_force_verify(expand(t, 7)).covered());
  auto out = root_swap_coprime(t, 5);
  CHECK(out.root->prime == 5);
  auto s = expand(out, 7);
  auto v = brute_force_verify(s);
  CHECK(v.covered());
  CHECK(v.lcm->value() == 20);
  CHECK(audit(s, 5).designated_prime_count == 3);
  auto deep = parse_tree("node 3 { leaf [3]; node 3 { leaf [3^2]; leaf [3^2]; leaf [3^2]; } leaf [3]; }");
  CHECK(error_of([&] { root_swap_coprime(deep, 5); }) == ErrorKind::PreconditionViolated);
}

TEST_CASE("root swap on a congruence list") {
  auto s = sys("2 % 3\n0 % 2*3\n3 % 2^2*3\n9 % 2^2*3\n1 % 2*3\n4 % 2^2*3\n10 % 2^2*3\n");
  REQUIRE(brute_force_verify(s).covered());
  auto out = root_swap_power(s, 3, 2, 5);
  CHECK(serialize_system(out) == "2 % 5\n3 % 5\n4 % 5\n0 % 2*5\n5 % 2^2*5\n15 % 2^2*5\n1 % 2*5\n6 % 2^2*5\n16 % 2^2*5\n");
  auto v = brute_force_verify(out);
  CHECK(v.covered());
  CHECK(v.lcm->value() == 20);

  CHECK(error_of([&] { root_swap_power(s, 3, 2, 2); }) != ErrorKind::IoError);
  CHECK(error_of([] { root_swap_power(sys("2 % 3\n0 % 3*5\n1 % 3*5\n"), 3, 2, 5); }) == ErrorKind::QDividesLcm);
  CHECK(error_of([&] { root_swap_power(s, 3, 1, 5); }) == ErrorKind::PreconditionViolated);
}

TEST_CASE("root swap class bijection") {
  // 9 = 0 mod 9 carries j = 0 and maps to 0 + 5*(9-0)/3 = 15, i.e. 0 mod 15.
  auto in = sys("1 % 3\n2 % 3\n0 % 3^2\n3 % 3^2\n6 % 3^2\n");
  auto out = root_swap_power(in, 3, 1, 5);
  Congruence want(0, fm({{3, 1}, {5, 1}}));
  bool found = false;
  for (auto& c : out.congruences()) found = found || c == want;
  CHECK(found);
  CHECK(brute_force_verify(out).covered());
  // phi(j + 3k) = j + 5k sends members of 0 mod 9 into 0 mod 15.
  for (std::uint64_t k = 0; k < 100; ++k) {
    std::uint64_t x = 9 * k;
    std::uint64_t j = x % 3, image = j + 5 * (x / 3);
    CHECK(image % 15 == 0);
  }
}

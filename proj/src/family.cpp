#include "covsys/family.hpp"

#include <map>
#include <unordered_set>

namespace covsys {

FamilyComponent FamilyComponent::fixed(std::uint64_t p, std::uint32_t e, const std::vector<std::uint32_t>& digits) {
  FamilyComponent c;
  c.prime = p;
  c.lo = c.hi = e;
  c.prefix.assign(digits.begin(), digits.begin() + (e - 1));
  c.last = digits[e - 1];
  return c;
}

Natural FamilyComponent::residue(std::uint32_t exponent) const {
  Natural r = 0;
  Natural base = from_u64(prime);
  for (std::uint32_t l = exponent; l-- > 0;) {
    r *= base;
    r += digit(l, exponent);
  }
  return r;
}

std::uint64_t CongruenceFamily::size() const {
  std::uint64_t n = 1;
  for (auto& c : comps) n *= (c.hi - c.lo + 1);
  return n;
}

std::vector<std::uint64_t> CongruenceFamily::primes() const {
  std::vector<std::uint64_t> ps;
  for (auto& c : comps) ps.push_back(c.prime);
  return ps;
}

Congruence CongruenceFamily::member(const std::vector<std::uint32_t>& exponents) const {
  std::vector<std::pair<Natural, FactoredNat>> parts;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    parts.emplace_back(comps[k].residue(exponents[k]), FactoredNat::prime_power(comps[k].prime, exponents[k]));
  }
  return crt_combine(parts);
}

std::size_t FamilyHash::operator()(const CongruenceFamily& f) const {
  std::size_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (auto& c : f.comps) {
    mix(c.prime);
    mix((static_cast<std::uint64_t>(c.lo) << 32) | c.hi);
    mix(c.last);
    for (auto d : c.prefix) mix(d);
  }
  return h;
}

FamilySystem FamilySystem::from_system(const CoveringSystem& s) {
  FamilySystem fs;
  for (std::size_t i = 0; i < s.size(); ++i) {
    CongruenceFamily f;
    for (auto& [p, e] : s[i].modulus().factors()) {
      if (p >> 32) throw Error(ErrorKind::Unsupported, "primes above 2^32 are not supported by the splitting verifier");
      std::vector<Natural> digits = base_digits(s[i].residue(), p, e);
      std::vector<std::uint32_t> d;
      for (auto& x : digits) d.push_back(static_cast<std::uint32_t>(x.get_ui()));
      f.comps.push_back(FamilyComponent::fixed(p, e, d));
    }
    f.label = s.label(i);
    fs.families_.push_back(std::move(f));
  }
  return fs;
}

void FamilySystem::add(CongruenceFamily f) { families_.push_back(std::move(f)); }

void FamilySystem::merge_identical() {
  std::unordered_set<CongruenceFamily, FamilyHash> seen;
  std::vector<CongruenceFamily> kept;
  for (auto& f : families_) {
    if (seen.insert(f).second) kept.push_back(std::move(f));
  }
  families_ = std::move(kept);
}

std::uint64_t FamilySystem::member_count() const {
  std::uint64_t n = 0;
  for (auto& f : families_) n += f.size();
  return n;
}

FactoredNat FamilySystem::lcm() const {
  std::map<std::uint64_t, std::uint32_t> top;
  for (auto& f : families_) {
    for (auto& c : f.comps) top[c.prime] = std::max(top[c.prime], c.hi);
  }
  std::vector<FactoredNat::Entry> e;
  for (auto& [p, x] : top) {
    if (x > 0) e.emplace_back(p, x);
  }
  return FactoredNat::from_factors(std::move(e));
}

CoveringSystem FamilySystem::materialize(std::uint64_t max_congruences) const {
  CoveringSystem out;
  std::unordered_set<Congruence, CongruenceHash> seen;
  for (auto& f : families_) {
    std::vector<std::uint32_t> ex;
    for (auto& c : f.comps) ex.push_back(c.lo);
    while (true) {
      Congruence c = f.member(ex);
      if (seen.insert(c).second) {
        if (out.size() >= max_congruences) {
          throw Error(ErrorKind::ResourceBudgetExceeded,
                      "materialization exceeds " + std::to_string(max_congruences) + " congruences");
        }
        out.add(c, f.label);
      }
      std::size_t k = 0;
      for (; k < ex.size(); ++k) {
        if (ex[k] < f.comps[k].hi) {
          ++ex[k];
          break;
        }
        ex[k] = f.comps[k].lo;
      }
      if (k == ex.size()) break;
    }
  }
  return out;
}

}  // namespace covsys

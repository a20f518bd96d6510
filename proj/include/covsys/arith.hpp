#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "covsys/error.hpp"

namespace covsys {

using Natural = mpz_class;
using Rational = mpq_class;

// Deterministic Miller-Rabin below 2^64.
bool is_prime(std::uint64_t n);
// Falls back to GMP's probabilistic test (50 rounds) above 2^64.
bool is_prime(const Natural& n);

std::uint64_t next_prime(std::uint64_t n);

bool fits_u64(const Natural& n);
std::uint64_t to_u64(const Natural& n);
Natural from_u64(std::uint64_t v);
Natural pow_u64(std::uint64_t p, std::uint32_t e);

// Positive integer kept as a sorted prime -> exponent list. Empty means 1.
class FactoredNat {
 public:
  using Entry = std::pair<std::uint64_t, std::uint32_t>;

  FactoredNat() = default;

  // Merges repeated primes; throws NonPrimeFactor on a composite key.
  static FactoredNat from_factors(std::vector<Entry> factors);
  static FactoredNat prime_power(std::uint64_t p, std::uint32_t e = 1);

  const std::vector<Entry>& factors() const { return f_; }
  std::size_t prime_count() const { return f_.size(); }
  bool is_one() const { return f_.empty(); }
  std::uint32_t exponent(std::uint64_t p) const;
  bool has_prime(std::uint64_t p) const { return exponent(p) > 0; }
  bool square_free() const;

  Natural value() const;
  // Value if it fits in 64 bits, otherwise 0.
  std::uint64_t value_u64() const;

  FactoredNat operator*(const FactoredNat& o) const;
  FactoredNat without(std::uint64_t p) const;
  FactoredNat with(std::uint64_t p, std::uint32_t e) const;
  FactoredNat lcm(const FactoredNat& o) const;
  bool divides(const FactoredNat& o) const;
  bool coprime(const FactoredNat& o) const;

  // "2*3^2*5", "1" when empty.
  std::string to_string() const;
  std::size_t hash() const;

  friend bool operator==(const FactoredNat& a, const FactoredNat& b) { return a.f_ == b.f_; }
  friend bool operator!=(const FactoredNat& a, const FactoredNat& b) { return a.f_ != b.f_; }
  // Numeric value order.
  friend bool operator<(const FactoredNat& a, const FactoredNat& b);

 private:
  std::vector<Entry> f_;
};

struct FactoredHash {
  std::size_t operator()(const FactoredNat& f) const { return f.hash(); }
};

FactoredNat factor(const Natural& n);
FactoredNat factor(std::uint64_t n);

class Congruence {
 public:
  Congruence() = default;
  // Throws ResidueOutOfRange unless 0 <= residue < modulus.
  Congruence(Natural residue, FactoredNat modulus);

  const Natural& residue() const { return residue_; }
  const FactoredNat& modulus() const { return modulus_; }
  bool contains(const Natural& x) const;

  // "24 % 2*3^2*5"
  std::string to_string() const;

  friend bool operator==(const Congruence& a, const Congruence& b) {
    return a.modulus_ == b.modulus_ && a.residue_ == b.residue_;
  }
  friend bool operator!=(const Congruence& a, const Congruence& b) { return !(a == b); }

 private:
  Natural residue_;
  FactoredNat modulus_;
};

struct CongruenceHash {
  std::size_t operator()(const Congruence& c) const;
};

// x == residue mod prime^exponent for every component.
class ResidueClass {
 public:
  struct Component {
    std::uint64_t prime;
    std::uint32_t exponent;
    Natural residue;
    friend bool operator==(const Component& a, const Component& b) {
      return a.prime == b.prime && a.exponent == b.exponent && a.residue == b.residue;
    }
  };

  ResidueClass() = default;
  static ResidueClass universal() { return {}; }
  static ResidueClass from_congruence(const Congruence& c);
  // Components may arrive in any order; exponent-0 entries are dropped.
  static ResidueClass from_components(std::vector<Component> comps);

  const std::vector<Component>& components() const { return comps_; }
  const Component* component(std::uint64_t p) const;
  std::uint32_t exponent(std::uint64_t p) const;

  FactoredNat modulus() const;
  Congruence to_congruence() const;
  Natural least_member() const { return to_congruence().residue(); }
  bool contains(const Natural& x) const;
  std::string to_string() const { return to_congruence().to_string(); }

  friend bool operator==(const ResidueClass& a, const ResidueClass& b) { return a.comps_ == b.comps_; }

 private:
  std::vector<Component> comps_;
};

enum class Relation { Equal, SubsetOfB, SupersetOfB, Disjoint, ProperOverlap };

const char* relation_name(Relation r);

std::vector<Natural> base_digits(const Natural& x, std::uint64_t p, std::uint32_t count);

Congruence crt_combine(const std::vector<std::pair<Natural, FactoredNat>>& parts);
Relation class_relation(const ResidueClass& a, const ResidueClass& b);
std::vector<ResidueClass> split_class(const ResidueClass& c, std::uint64_t p);

}  // namespace covsys

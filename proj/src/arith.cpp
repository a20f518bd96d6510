#include "covsys/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace covsys {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::ResidueOutOfRange: return "ResidueOutOfRange";
    case ErrorKind::NonPrimeFactor: return "NonPrimeFactor";
    case ErrorKind::ModulusOne: return "ModulusOne";
    case ErrorKind::NonCoprimeParts: return "NonCoprimeParts";
    case ErrorKind::ChildCountMismatch: return "ChildCountMismatch";
    case ErrorKind::UnknownPathPrime: return "UnknownPathPrime";
    case ErrorKind::WedgeTakeTooLarge: return "WedgeTakeTooLarge";
    case ErrorKind::QCollision: return "QCollision";
    case ErrorKind::QTooSmall: return "QTooSmall";
    case ErrorKind::QNotGreater: return "QNotGreater";
    case ErrorKind::QDividesLcm: return "QDividesLcm";
    case ErrorKind::NoValidQ: return "NoValidQ";
    case ErrorKind::NonPrime: return "NonPrime";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::StructureMismatch: return "StructureMismatch";
    case ErrorKind::LcmExceedsLimit: return "LcmExceedsLimit";
    case ErrorKind::ResourceBudgetExceeded: return "ResourceBudgetExceeded";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

static std::string located(const std::string& msg, int line, int column) {
  if (line <= 0) return msg;
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg;
}

Error::Error(ErrorKind kind, const std::string& msg, int line, int column)
    : std::runtime_error(located(msg, line, column)), kind_(kind), line_(line), column_(column) {}

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool miller_rabin(u64 n, u64 a) {
  if (a % n == 0) return true;
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

u64 pollard_brent(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    u64 r = 1;
    const u64 m = 128;
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      } while (k < r && g == 1);
      r <<= 1;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_u64(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_brent(n);
  factor_u64(d, out);
  factor_u64(n / d, out);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  static const u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : small) {
    if (n % p == 0) return n == p;
  }
  for (u64 a : small) {
    if (!miller_rabin(n, a)) return false;
  }
  return true;
}

bool is_prime(const Natural& n) {
  if (n < 2) return false;
  if (fits_u64(n)) return is_prime(to_u64(n));
  return mpz_probab_prime_p(n.get_mpz_t(), 50) > 0;
}

std::uint64_t next_prime(std::uint64_t n) {
  u64 c = n + 1;
  while (!is_prime(c)) ++c;
  return c;
}

bool fits_u64(const Natural& n) {
  return sgn(n) >= 0 && mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

std::uint64_t to_u64(const Natural& n) {
  u64 v = 0;
  mpz_export(&v, nullptr, -1, sizeof(v), 0, 0, n.get_mpz_t());
  return v;
}

Natural from_u64(std::uint64_t v) {
  Natural r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return r;
}

Natural pow_u64(std::uint64_t p, std::uint32_t e) {
  Natural r;
  mpz_pow_ui(r.get_mpz_t(), from_u64(p).get_mpz_t(), e);
  return r;
}

FactoredNat FactoredNat::from_factors(std::vector<Entry> factors) {
  std::sort(factors.begin(), factors.end());
  FactoredNat out;
  for (auto& [p, e] : factors) {
    if (e == 0) continue;
    if (!is_prime(p)) throw Error(ErrorKind::NonPrimeFactor, std::to_string(p) + " is not prime");
    if (!out.f_.empty() && out.f_.back().first == p) {
      out.f_.back().second += e;
    } else {
      out.f_.emplace_back(p, e);
    }
  }
  return out;
}

FactoredNat FactoredNat::prime_power(std::uint64_t p, std::uint32_t e) { return from_factors({{p, e}}); }

std::uint32_t FactoredNat::exponent(std::uint64_t p) const {
  auto it = std::lower_bound(f_.begin(), f_.end(), Entry{p, 0});
  return it != f_.end() && it->first == p ? it->second : 0;
}

bool FactoredNat::square_free() const {
  return std::all_of(f_.begin(), f_.end(), [](const Entry& e) { return e.second == 1; });
}

Natural FactoredNat::value() const {
  Natural r = 1;
  for (auto& [p, e] : f_) r *= pow_u64(p, e);
  return r;
}

std::uint64_t FactoredNat::value_u64() const {
  u128 r = 1;
  for (auto& [p, e] : f_) {
    for (std::uint32_t i = 0; i < e; ++i) {
      r *= p;
      if (r >> 64) return 0;
    }
  }
  return static_cast<u64>(r);
}

FactoredNat FactoredNat::operator*(const FactoredNat& o) const {
  FactoredNat r;
  std::size_t i = 0, j = 0;
  while (i < f_.size() || j < o.f_.size()) {
    if (j == o.f_.size() || (i < f_.size() && f_[i].first < o.f_[j].first)) {
      r.f_.push_back(f_[i++]);
    } else if (i == f_.size() || o.f_[j].first < f_[i].first) {
      r.f_.push_back(o.f_[j++]);
    } else {
      r.f_.emplace_back(f_[i].first, f_[i].second + o.f_[j].second);
      ++i;
      ++j;
    }
  }
  return r;
}

FactoredNat FactoredNat::without(std::uint64_t p) const {
  FactoredNat r;
  for (auto& e : f_) {
    if (e.first != p) r.f_.push_back(e);
  }
  return r;
}

FactoredNat FactoredNat::with(std::uint64_t p, std::uint32_t e) const {
  FactoredNat r = without(p);
  if (e == 0) return r;
  if (!is_prime(p)) throw Error(ErrorKind::NonPrimeFactor, std::to_string(p) + " is not prime");
  auto it = std::lower_bound(r.f_.begin(), r.f_.end(), Entry{p, 0});
  r.f_.insert(it, Entry{p, e});
  return r;
}

FactoredNat FactoredNat::lcm(const FactoredNat& o) const {
  FactoredNat r;
  std::size_t i = 0, j = 0;
  while (i < f_.size() || j < o.f_.size()) {
    if (j == o.f_.size() || (i < f_.size() && f_[i].first < o.f_[j].first)) {
      r.f_.push_back(f_[i++]);
    } else if (i == f_.size() || o.f_[j].first < f_[i].first) {
      r.f_.push_back(o.f_[j++]);
    } else {
      r.f_.emplace_back(f_[i].first, std::max(f_[i].second, o.f_[j].second));
      ++i;
      ++j;
    }
  }
  return r;
}

bool FactoredNat::divides(const FactoredNat& o) const {
  for (auto& [p, e] : f_) {
    if (o.exponent(p) < e) return false;
  }
  return true;
}

bool FactoredNat::coprime(const FactoredNat& o) const {
  for (auto& [p, e] : f_) {
    if (o.has_prime(p)) return false;
  }
  return true;
}

std::string FactoredNat::to_string() const {
  if (f_.empty()) return "1";
  std::string s;
  for (auto& [p, e] : f_) {
    if (!s.empty()) s += '*';
    s += std::to_string(p);
    if (e > 1) s += '^' + std::to_string(e);
  }
  return s;
}

std::size_t FactoredNat::hash() const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (auto& [p, e] : f_) {
    h ^= std::hash<u64>{}(p * 0x100000001b3ULL + e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

bool operator<(const FactoredNat& a, const FactoredNat& b) {
  if (a.f_ == b.f_) return false;
  u64 va = a.value_u64(), vb = b.value_u64();
  if (va && vb) return va < vb;
  double la = 0, lb = 0;
  for (auto& [p, e] : a.f_) la += e * std::log(static_cast<double>(p));
  for (auto& [p, e] : b.f_) lb += e * std::log(static_cast<double>(p));
  if (std::abs(la - lb) > 1e-9 * std::max(la, lb)) return la < lb;
  return a.value() < b.value();
}

FactoredNat factor(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "factor: n must be positive");
  std::vector<u64> ps;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
    while (n % p == 0) {
      ps.push_back(p);
      n /= p;
    }
  }
  factor_u64(n, ps);
  std::vector<FactoredNat::Entry> entries;
  for (u64 p : ps) entries.emplace_back(p, 1);
  return FactoredNat::from_factors(std::move(entries));
}

FactoredNat factor(const Natural& n) {
  if (n <= 0) throw Error(ErrorKind::InvalidArgument, "factor: n must be positive");
  if (fits_u64(n)) return factor(to_u64(n));
  Natural rest = n;
  std::vector<FactoredNat::Entry> entries;
  for (u64 p = 2; p < 1000000 && !fits_u64(rest); p = next_prime(p)) {
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      entries.emplace_back(p, 1);
      rest /= p;
    }
  }
  if (!fits_u64(rest)) {
    throw Error(ErrorKind::Unsupported, "factor: cofactor " + rest.get_str() + " exceeds 64 bits");
  }
  FactoredNat tail = factor(to_u64(rest));
  for (auto& e : tail.factors()) entries.push_back(e);
  return FactoredNat::from_factors(std::move(entries));
}

Congruence::Congruence(Natural residue, FactoredNat modulus)
    : residue_(std::move(residue)), modulus_(std::move(modulus)) {
  if (sgn(residue_) < 0 || residue_ >= modulus_.value()) {
    throw Error(ErrorKind::ResidueOutOfRange,
                "residue " + residue_.get_str() + " out of range for modulus " + modulus_.to_string());
  }
}

bool Congruence::contains(const Natural& x) const {
  Natural r = x % modulus_.value();
  if (sgn(r) < 0) r += modulus_.value();
  return r == residue_;
}

std::string Congruence::to_string() const { return residue_.get_str() + " % " + modulus_.to_string(); }

std::size_t CongruenceHash::operator()(const Congruence& c) const {
  std::size_t h = c.modulus().hash();
  std::size_t n = mpz_size(c.residue().get_mpz_t());
  for (std::size_t i = 0; i < n; ++i) {
    h ^= std::hash<u64>{}(mpz_getlimbn(c.residue().get_mpz_t(), i)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

ResidueClass ResidueClass::from_congruence(const Congruence& c) {
  ResidueClass r;
  for (auto& [p, e] : c.modulus().factors()) {
    r.comps_.push_back({p, e, Natural(c.residue() % pow_u64(p, e))});
  }
  return r;
}

ResidueClass ResidueClass::from_components(std::vector<Component> comps) {
  ResidueClass r;
  std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) { return a.prime < b.prime; });
  for (auto& c : comps) {
    if (c.exponent == 0) continue;
    if (!r.comps_.empty() && r.comps_.back().prime == c.prime) {
      throw Error(ErrorKind::InvalidArgument, "duplicate prime " + std::to_string(c.prime) + " in residue class");
    }
    Natural pe = pow_u64(c.prime, c.exponent);
    if (sgn(c.residue) < 0 || c.residue >= pe) {
      throw Error(ErrorKind::ResidueOutOfRange, "component residue out of range");
    }
    r.comps_.push_back(std::move(c));
  }
  return r;
}

const ResidueClass::Component* ResidueClass::component(std::uint64_t p) const {
  for (auto& c : comps_) {
    if (c.prime == p) return &c;
  }
  return nullptr;
}

std::uint32_t ResidueClass::exponent(std::uint64_t p) const {
  auto* c = component(p);
  return c ? c->exponent : 0;
}

FactoredNat ResidueClass::modulus() const {
  std::vector<FactoredNat::Entry> f;
  for (auto& c : comps_) f.emplace_back(c.prime, c.exponent);
  return FactoredNat::from_factors(std::move(f));
}

Congruence ResidueClass::to_congruence() const {
  std::vector<std::pair<Natural, FactoredNat>> parts;
  for (auto& c : comps_) parts.emplace_back(c.residue, FactoredNat::prime_power(c.prime, c.exponent));
  return crt_combine(parts);
}

bool ResidueClass::contains(const Natural& x) const {
  for (auto& c : comps_) {
    Natural r = x % pow_u64(c.prime, c.exponent);
    if (sgn(r) < 0) r += pow_u64(c.prime, c.exponent);
    if (r != c.residue) return false;
  }
  return true;
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::Equal: return "Equal";
    case Relation::SubsetOfB: return "SubsetOfB";
    case Relation::SupersetOfB: return "SupersetOfB";
    case Relation::Disjoint: return "Disjoint";
    case Relation::ProperOverlap: return "ProperOverlap";
  }
  return "?";
}

std::vector<Natural> base_digits(const Natural& x, std::uint64_t p, std::uint32_t count) {
  std::vector<Natural> d;
  d.reserve(count);
  Natural rest = x;
  Natural base = from_u64(p);
  for (std::uint32_t i = 0; i < count; ++i) {
    Natural q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), rest.get_mpz_t(), base.get_mpz_t());
    d.push_back(r);
    rest = q;
  }
  return d;
}

Congruence crt_combine(const std::vector<std::pair<Natural, FactoredNat>>& parts) {
  Natural x = 0;
  FactoredNat m;
  for (auto& [r, mi] : parts) {
    if (!m.coprime(mi)) {
      throw Error(ErrorKind::NonCoprimeParts, "moduli " + m.to_string() + " and " + mi.to_string() + " share a prime");
    }
    Natural mv = m.value(), miv = mi.value();
    Natural ri = r % miv;
    if (sgn(ri) < 0) ri += miv;
    Natural inv;
    if (miv == 1) {
      inv = 0;
    } else {
      mpz_invert(inv.get_mpz_t(), Natural(mv % miv).get_mpz_t(), miv.get_mpz_t());
    }
    Natural t = ((ri - x) % miv) * inv % miv;
    if (sgn(t) < 0) t += miv;
    x += mv * t;
    m = m * mi;
  }
  return Congruence(x, m);
}

Relation class_relation(const ResidueClass& a, const ResidueClass& b) {
  bool a_in_b = true, b_in_a = true;
  for (auto& cb : b.components()) {
    auto* ca = a.component(cb.prime);
    if (!ca) {
      a_in_b = false;
      continue;
    }
    std::uint32_t lo = std::min(ca->exponent, cb.exponent);
    Natural pe = pow_u64(cb.prime, lo);
    if (Natural(ca->residue % pe) != Natural(cb.residue % pe)) return Relation::Disjoint;
    if (ca->exponent < cb.exponent) a_in_b = false;
    if (cb.exponent < ca->exponent) b_in_a = false;
  }
  for (auto& ca : a.components()) {
    if (!b.component(ca.prime)) b_in_a = false;
  }
  if (a_in_b && b_in_a) return Relation::Equal;
  if (a_in_b) return Relation::SubsetOfB;
  if (b_in_a) return Relation::SupersetOfB;
  return Relation::ProperOverlap;
}

std::vector<ResidueClass> split_class(const ResidueClass& c, std::uint64_t p) {
  if (!is_prime(p)) throw Error(ErrorKind::NonPrime, std::to_string(p) + " is not prime");
  std::vector<ResidueClass> out;
  auto* comp = c.component(p);
  std::uint32_t e = comp ? comp->exponent : 0;
  Natural base = comp ? comp->residue : Natural(0);
  Natural step = pow_u64(p, e);
  for (u64 d = 0; d < p; ++d) {
    std::vector<ResidueClass::Component> comps;
    for (auto& x : c.components()) {
      if (x.prime != p) comps.push_back(x);
    }
    comps.push_back({p, e + 1, base + step * from_u64(d)});
    out.push_back(ResidueClass::from_components(std::move(comps)));
  }
  return out;
}

}  // namespace covsys

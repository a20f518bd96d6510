#include "covsys/transforms.hpp"

#include <algorithm>
#include <set>

namespace covsys {

namespace {

[[noreturn]] void violated(const std::string& msg) { throw Error(ErrorKind::PreconditionViolated, msg); }

void require_prime(std::uint64_t p, const char* what) {
  if (!is_prime(p)) throw Error(ErrorKind::NonPrime, std::string(what) + " = " + std::to_string(p) + " is not prime");
}

FactoredNat power_of(std::uint64_t p, std::uint32_t e) {
  return e == 0 ? FactoredNat{} : FactoredNat::prime_power(p, e);
}

Congruence combine(const Natural& a, const FactoredNat& ma, const Natural& b, const FactoredNat& mb) {
  std::vector<std::pair<Natural, FactoredNat>> parts;
  if (!ma.is_one()) parts.emplace_back(Natural(a % ma.value()), ma);
  if (!mb.is_one()) parts.emplace_back(Natural(b % mb.value()), mb);
  return crt_combine(parts);
}

bool has_prime_congruence(const CoveringSystem& s, std::uint64_t p, std::uint64_t r) {
  FactoredNat mp = FactoredNat::prime_power(p, 1);
  for (auto& c : s.congruences()) {
    if (c.modulus() == mp && c.residue() == from_u64(r)) return true;
  }
  return false;
}

std::set<std::uint64_t> prime_residues(const CoveringSystem& s, std::uint64_t p) {
  FactoredNat mp = FactoredNat::prime_power(p, 1);
  std::set<std::uint64_t> out;
  for (auto& c : s.congruences()) {
    if (c.modulus() == mp) out.insert(to_u64(c.residue()));
  }
  return out;
}

}  // namespace

CoveringSystem swap_residues(const CoveringSystem& s, std::uint64_t p, std::uint64_t r1, std::uint64_t r2) {
  require_prime(p, "p");
  if (r1 >= p || r2 >= p) violated("residues must lie below p");
  if (r1 == r2) violated("r1 and r2 must differ");
  if (!has_prime_congruence(s, p, r1)) violated(std::to_string(r1) + " mod " + std::to_string(p) + " is not in the system");
  if (has_prime_congruence(s, p, r2)) violated(std::to_string(r2) + " mod " + std::to_string(p) + " is already in the system");

  CoveringSystem out;
  Natural shift = from_u64(r2) - from_u64(r1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Congruence& c = s[i];
    std::uint32_t v = c.modulus().exponent(p);
    if (v == 0) {
      out.add(c, s.label(i));
      continue;
    }
    FactoredNat pv = FactoredNat::prime_power(p, v);
    Natural pvv = pv.value();
    Natural x = c.residue() % pvv;
    Natural d = x % from_u64(p);
    if (d == from_u64(r1)) x += shift;
    else if (d == from_u64(r2)) x -= shift;
    x %= pvv;
    if (x < 0) x += pvv;
    out.add(combine(c.residue(), c.modulus().without(p), x, pv), s.label(i));
  }
  return out;
}

LiftResult lift_squarefree(const CoveringSystem& c0, std::uint64_t p, std::optional<std::uint64_t> q) {
  require_prime(p, "p");
  LiftResult res;
  CoveringSystem s = c0;
  std::set<std::uint64_t> a = prime_residues(s, p);
  if (a.size() < 2) violated("need two congruences of modulus " + std::to_string(p));
  if (!a.count(0)) {
    std::uint64_t from = *a.begin() == 1 ? *std::next(a.begin()) : *a.begin();
    s = swap_residues(s, p, from, 0);
    a = prime_residues(s, p);
  }
  if (!a.count(1)) {
    s = swap_residues(s, p, *std::next(a.begin()), 1);
  }
  res.normalized = s;

  FactoredNat mp = FactoredNat::prime_power(p, 1);
  std::vector<const Congruence*> free_part;
  std::map<std::uint64_t, std::vector<std::pair<Natural, FactoredNat>>> xi_part;
  FactoredNat m;
  bool seen0 = false, seen1 = false;
  for (auto& c : s.congruences()) {
    std::uint32_t v = c.modulus().exponent(p);
    if (c.modulus() == mp && c.residue() <= 1) {
      bool& seen = c.residue() == 0 ? seen0 : seen1;
      if (!seen) {
        seen = true;
        continue;
      }
    }
    if (v == 0) {
      free_part.push_back(&c);
      m = m.lcm(c.modulus());
      continue;
    }
    if (v > 1) throw Error(ErrorKind::StructureMismatch, c.to_string() + " has a modulus divisible by " + std::to_string(p) + "^2");
    std::uint64_t xi = to_u64(Natural(c.residue() % from_u64(p)));
    if (xi <= 1) throw Error(ErrorKind::StructureMismatch, c.to_string() + " lies in the class " + std::to_string(xi) + " mod " + std::to_string(p));
    FactoredNat rest = c.modulus().without(p);
    xi_part[xi].emplace_back(rest.is_one() ? Natural(0) : Natural(c.residue() % rest.value()), rest);
    m = m.lcm(rest);
  }

  FactoredNat pm = m * mp;
  if (q) {
    if (*q == 2 || !is_prime(*q)) violated("q must be an odd prime");
    if (pm.has_prime(*q)) violated("q = " + std::to_string(*q) + " divides p*m");
    res.q = *q;
  } else {
    for (std::uint64_t c = 3; c < 1'000'000; c = next_prime(c)) {
      if (!pm.has_prime(c)) {
        res.q = c;
        break;
      }
    }
    if (res.q == 0) throw Error(ErrorKind::NoValidQ, "no odd prime below 10^6 avoids p*m");
  }
  std::uint64_t qq = res.q;
  if (qq > 100000) throw Error(ErrorKind::ResourceBudgetExceeded, "q too large to materialize the lift");
  auto qi = static_cast<std::uint32_t>(qq);
  FactoredNat mq = FactoredNat::prime_power(qq, 1);

  CoveringSystem& out = res.system;
  for (std::uint32_t i = 0; i + 2 <= qi; ++i) out.add(Congruence(pow_u64(p, i), power_of(p, i + 1)));
  for (std::uint32_t i = 0; i < qi; ++i) out.add(combine(0, power_of(p, i), from_u64(i), mq));
  for (auto* c : free_part) out.add(*c);
  for (auto& [xi, list] : xi_part) {
    for (std::uint32_t i = 0; i + 2 <= qi; ++i) {
      Natural cls = from_u64(xi) * pow_u64(p, i);
      for (auto& [r, mx] : list) out.add(combine(cls, power_of(p, i + 1), r, mx));
    }
  }

  for (std::uint64_t xi = 2; xi < p; ++xi) {
    CoveringSystem cx;
    for (auto* c : free_part) cx.add(*c);
    if (auto it = xi_part.find(xi); it != xi_part.end()) {
      for (auto& [r, mx] : it->second) cx.add(Congruence(r, mx));
    }
    res.intermediates.emplace(xi, std::move(cx));
  }
  return res;
}

namespace {

class CoprimeSwap {
 public:
  CoprimeSwap(std::uint64_t p, std::uint64_t q) : p_(p), q_(q) {}

  void check(const TreeNode& n, bool root) {
    if (!root && n.prime == p_) violated("a " + std::to_string(p_) + "-node occurs below the root");
    for (auto& c : n.children) {
      if (auto* l = std::get_if<Leaf>(&c)) check_factors(l->retained);
      else if (auto* w = std::get_if<Wedge>(&c)) {
        check_factors(w->base);
        for (auto& o : w->optional) check_factors(o);
      } else if (auto* sub = std::get_if<NodePtr>(&c)) check(**sub, false);
    }
  }

  NodePtr map(const TreeNode& n) {
    ++path_[n.prime];
    auto out = std::make_shared<TreeNode>();
    out->prime = swap(n.prime);
    for (auto& c : n.children) {
      if (auto* l = std::get_if<Leaf>(&c)) {
        out->children.emplace_back(Leaf{swap(l->retained)});
      } else if (auto* w = std::get_if<Wedge>(&c)) {
        for (auto& prod : wedge_products(resolve(*w))) {
          FactorList f;
          for (auto& [pr, e] : prod.factors()) f.push_back(Factor{swap(pr), e, false});
          out->children.emplace_back(Leaf{std::move(f)});
        }
      } else if (auto* pw = std::get_if<Power>(&c)) {
        out->children.emplace_back(Power{swap(pw->base), pw->start_exponent, pw->term});
      } else {
        out->children.emplace_back(map(*std::get<NodePtr>(c)));
      }
    }
    if (n.prime == q_) out->children.resize(p_);
    --path_[n.prime];
    return out;
  }

 private:
  void check_factors(const FactorList& l) {
    for (auto& f : l) {
      if (f.prime == p_ && !f.path_ref && f.exponent > 1) {
        violated("modulus divisible by " + std::to_string(p_) + "^2");
      }
    }
  }

  std::uint64_t swap(std::uint64_t x) const { return x == p_ ? q_ : x == q_ ? p_ : x; }
  FactorList swap(const FactorList& l) const {
    FactorList out = l;
    for (auto& f : out) f.prime = swap(f.prime);
    return out;
  }
  FactorList literal(const FactorList& l) const {
    FactorList out = l;
    for (auto& f : out) {
      if (f.path_ref) {
        auto it = path_.find(f.prime);
        f.exponent = it == path_.end() ? 0 : it->second;
        f.path_ref = false;
        if (f.exponent == 0) throw Error(ErrorKind::UnknownPathPrime, "@" + std::to_string(f.prime) + " is not on the path");
      }
    }
    return out;
  }
  Wedge resolve(const Wedge& w) const {
    Wedge r;
    r.take = w.take;
    r.base = literal(w.base);
    for (auto& o : w.optional) r.optional.push_back(literal(o));
    return r;
  }

  std::uint64_t p_, q_;
  std::map<std::uint64_t, std::uint32_t> path_;
};

}  // namespace

TreeSpec root_swap_coprime(const TreeSpec& t, std::uint64_t q) {
  if (!t.root) throw Error(ErrorKind::InvalidArgument, "empty tree");
  std::uint64_t p = t.root->prime;
  require_prime(q, "q");
  if (q <= p) throw Error(ErrorKind::QNotGreater, "q = " + std::to_string(q) + " must exceed " + std::to_string(p));
  for (auto& c : t.root->children) {
    if (auto* l = std::get_if<Leaf>(&c)) {
      const auto& f = l->retained;
      if (f.size() != 1 || f[0].prime != p || (!f[0].path_ref && f[0].exponent != 1)) {
        violated("root leaves must have modulus exactly " + std::to_string(p));
      }
    } else if (!std::holds_alternative<NodePtr>(c)) {
      violated("root children must be leaves of modulus p or subtrees");
    }
  }
  CoprimeSwap sw(p, q);
  sw.check(*t.root, true);

  NodePtr mapped = sw.map(*t.root);
  auto root = std::make_shared<TreeNode>(*mapped);
  for (std::uint64_t i = 0; i < q - p; ++i) root->children.emplace_back(Leaf{FactorList{Factor{q, 1, false}}});
  TreeSpec out;
  out.root = root;
  out.declared_q = t.declared_q;
  if (out.declared_q && (*out.declared_q == p || *out.declared_q == q)) out.declared_q = std::nullopt;
  return out;
}

CoveringSystem root_swap_power(const CoveringSystem& s, std::uint64_t p, std::uint64_t t, std::uint64_t q) {
  require_prime(p, "p");
  require_prime(q, "q");
  if (q == 2) violated("q must be odd");
  if (t > p) violated("t exceeds p");
  if (q < t) violated("q must be at least t");
  if (s.lcm().has_prime(q)) throw Error(ErrorKind::QDividesLcm, std::to_string(q) + " divides the lcm of the moduli");

  std::set<std::uint64_t> roots = prime_residues(s, p);
  if (roots.size() != p - t) {
    violated(std::to_string(roots.size()) + " congruences of modulus " + std::to_string(p) + ", expected " +
             std::to_string(p - t));
  }
  std::vector<std::uint64_t> classes;
  for (std::uint64_t j = 0; j < p; ++j) {
    if (!roots.count(j)) classes.push_back(j);
  }
  bool relabel = !classes.empty() && classes.back() >= q;
  std::map<std::uint64_t, std::uint64_t> label;
  for (std::size_t k = 0; k < classes.size(); ++k) label[classes[k]] = relabel ? k : classes[k];

  CoveringSystem out;
  std::set<std::uint64_t> used;
  for (auto& [j, l] : label) used.insert(l);
  for (std::uint64_t c = 0; c < q; ++c) {
    if (!used.count(c)) out.add(Congruence(from_u64(c), FactoredNat::prime_power(q, 1)));
  }
  FactoredNat mp = FactoredNat::prime_power(p, 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Congruence& c = s[i];
    if (c.modulus() == mp) continue;
    std::uint32_t alpha = c.modulus().exponent(p);
    if (alpha == 0) violated(c.to_string() + " does not lie in a single class mod " + std::to_string(p));
    std::uint64_t j = to_u64(Natural(c.residue() % from_u64(p)));
    if (roots.count(j)) violated(c.to_string() + " lies in a root leaf class");
    Natural k = (c.residue() - from_u64(j)) / from_u64(p);
    FactoredNat m = c.modulus().without(p) * power_of(p, alpha - 1) * FactoredNat::prime_power(q, 1);
    Natural r = (from_u64(label[j]) + from_u64(q) * k) % m.value();
    out.add(Congruence(r, m), s.label(i));
  }
  return out;
}

}  // namespace covsys

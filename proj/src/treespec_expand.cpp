#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "covsys/treespec.hpp"

namespace covsys {

namespace {

using Digits = std::vector<std::uint32_t>;

void collect_primes(const TreeNode& n, std::set<std::uint64_t>& out) {
  out.insert(n.prime);
  auto add = [&out](const FactorList& l) {
    for (auto& f : l) out.insert(f.prime);
  };
  for (auto& c : n.children) {
    if (auto* l = std::get_if<Leaf>(&c)) add(l->retained);
    else if (auto* w = std::get_if<Wedge>(&c)) {
      add(w->base);
      for (auto& o : w->optional) add(o);
    } else if (auto* sub = std::get_if<NodePtr>(&c)) collect_primes(**sub, out);
  }
}

void check_q(const TreeSpec& t, std::uint64_t q, bool force_q) {
  if (!t.root) throw Error(ErrorKind::InvalidArgument, "empty tree");
  if (!is_prime(q)) throw Error(ErrorKind::NonPrime, "q = " + std::to_string(q) + " is not prime");
  if (q >> 31) throw Error(ErrorKind::Unsupported, "q must stay below 2^31");
  std::set<std::uint64_t> ps;
  collect_primes(*t.root, ps);
  if (!force_q && ps.count(q)) {
    throw Error(ErrorKind::QCollision, "q = " + std::to_string(q) + " already occurs in the tree");
  }
}

// Template exponents of the primes on the current path.
class TemplatePath {
 public:
  std::uint32_t get(std::uint64_t p) const {
    auto it = e_.find(p);
    return it == e_.end() ? 0 : it->second;
  }
  void push(std::uint64_t p) { ++e_[p]; }
  void pop(std::uint64_t p) {
    if (--e_[p] == 0) e_.erase(p);
  }

  FactoredNat resolve(const FactorList& l) const {
    std::vector<FactoredNat::Entry> v;
    for (auto& f : l) {
      std::uint32_t e = f.path_ref ? get(f.prime) : f.exponent;
      if (e == 0) throw Error(ErrorKind::UnknownPathPrime, "@" + std::to_string(f.prime) + " is not on the path");
      v.emplace_back(f.prime, e);
    }
    return FactoredNat::from_factors(std::move(v));
  }

  std::vector<FactoredNat> products(const Wedge& w) const {
    Wedge lit;
    lit.take = w.take;
    auto literal = [this](const FactorList& l) {
      FactorList out;
      FactoredNat r = resolve(l);
      for (auto& [p, e] : r.factors()) out.push_back(Factor{p, e, false});
      return out;
    };
    lit.base = literal(w.base);
    for (auto& o : w.optional) lit.optional.push_back(literal(o));
    return wedge_products(lit);
  }

 private:
  std::map<std::uint64_t, std::uint32_t> e_;
};

class ConcreteWalk {
 public:
  ConcreteWalk(std::uint64_t q, const ExpandOptions& opt) : q_(q), opt_(opt) {}

  CoveringSystem run(const TreeNode& root) {
    node(root);
    return std::move(out_);
  }

 private:
  void node(const TreeNode& n) {
    std::uint64_t p = n.prime;
    if (sub_.count(p)) throw Error(ErrorKind::Unsupported, "prime " + std::to_string(p) + " split again below its power branch");
    tmpl_.push(p);
    std::uint32_t pos = 0;
    for (auto& c : n.children) {
      if (auto* pw = std::get_if<Power>(&c)) {
        push(p, 0, "0");
        power_copy(n, *pw, pw->start_exponent + 1);
        pop(p);
        pos = 1;
        continue;
      }
      pos = child(p, c, pos);
    }
    tmpl_.pop(p);
  }

  // Walks child c of a p-node starting at position pos; returns the next position.
  std::uint32_t child(std::uint64_t p, const Child& c, std::uint32_t pos) {
    if (auto* l = std::get_if<Leaf>(&c)) {
      push(p, pos, std::to_string(pos));
      emit(tmpl_.resolve(l->retained));
      pop(p);
      return pos + 1;
    }
    if (auto* w = std::get_if<Wedge>(&c)) {
      for (auto& prod : tmpl_.products(*w)) {
        push(p, pos, std::to_string(pos));
        emit(prod);
        pop(p);
        ++pos;
      }
      return pos;
    }
    push(p, pos, std::to_string(pos));
    node(*std::get<NodePtr>(c));
    pop(p);
    return pos + 1;
  }

  // The chain node at exponent i of a power branch, splitting the class whose
  // c-exponent is i-1.
  void power_copy(const TreeNode& n, const Power& pw, std::uint32_t i) {
    std::uint64_t c = n.prime;
    if (i >= q_) {
      terminal(c, pw);
      return;
    }
    push(c, 0, "c" + std::to_string(i));
    power_copy(n, pw, i + 1);
    pop(c);
    sub_[c] = {pw.start_exponent, i};
    std::uint32_t pos = 1;
    if (opt_.labels) label_.push_back("c" + std::to_string(i));
    for (std::size_t k = 1; k < n.children.size(); ++k) pos = child(c, n.children[k], pos);
    if (opt_.labels) label_.pop_back();
    sub_.erase(c);
  }

  void terminal(std::uint64_t c, const Power& pw) {
    for (std::uint32_t j = 0; j < q_; ++j) {
      push(q_, j, "t" + std::to_string(j));
      std::vector<FactoredNat::Entry> f;
      if (pw.term == Termination::FullContext) {
        for (auto& [p, d] : digits_) {
          if (p != c && p != q_) f.emplace_back(p, static_cast<std::uint32_t>(d.size()));
        }
      }
      if (j > 0) f.emplace_back(c, j);
      f.emplace_back(q_, static_cast<std::uint32_t>(digits_[q_].size()));
      emit(FactoredNat::from_factors(std::move(f)), false);
      pop(q_);
    }
  }

  void push(std::uint64_t p, std::uint32_t d, std::string label) {
    digits_[p].push_back(d);
    if (opt_.labels) label_.push_back(std::move(label));
  }
  void pop(std::uint64_t p) {
    auto it = digits_.find(p);
    it->second.pop_back();
    if (it->second.empty()) digits_.erase(it);
    if (opt_.labels) label_.pop_back();
  }

  void emit(const FactoredNat& tmpl_mod, bool substitute = true) {
    std::vector<std::pair<Natural, FactoredNat>> parts;
    for (auto [p, e] : tmpl_mod.factors()) {
      if (substitute) {
        auto s = sub_.find(p);
        if (s != sub_.end() && s->second.first == e) e = s->second.second;
      }
      auto it = digits_.find(p);
      std::uint32_t have = it == digits_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
      if (e > have) {
        throw Error(ErrorKind::StructureMismatch, "leaf " + path_label() + " retains " + std::to_string(p) + "^" +
                                                      std::to_string(e) + " but the path has only " +
                                                      std::to_string(p) + "^" + std::to_string(have));
      }
      Natural r = 0;
      Natural base = from_u64(p);
      for (std::uint32_t l = e; l-- > 0;) {
        r *= base;
        r += it->second[l];
      }
      parts.emplace_back(std::move(r), FactoredNat::prime_power(p, e));
    }
    Congruence cg = crt_combine(parts);
    ++raw_;
    if (opt_.merge_identical && !seen_.insert(cg).second) return;
    if (out_.size() >= opt_.max_congruences) {
      throw Error(ErrorKind::ResourceBudgetExceeded,
                  "expansion exceeds " + std::to_string(opt_.max_congruences) + " congruences");
    }
    out_.add(std::move(cg), opt_.labels ? path_label() : std::string());
  }

  std::string path_label() const {
    std::string s = "root";
    for (auto& l : label_) s += "." + l;
    return s;
  }

  std::uint64_t q_;
  ExpandOptions opt_;
  std::map<std::uint64_t, Digits> digits_;
  TemplatePath tmpl_;
  std::map<std::uint64_t, std::pair<std::uint32_t, std::uint32_t>> sub_;
  std::vector<std::string> label_;
  std::unordered_set<Congruence, CongruenceHash> seen_;
  CoveringSystem out_;
  std::uint64_t raw_ = 0;
};

struct Chain {
  std::uint32_t e0 = 0;
  std::uint32_t hi = 0;
  Digits prefix;
  std::uint32_t pos = 0;
};

class FamilyWalk {
 public:
  FamilyWalk(std::uint64_t q, const ExpandOptions& opt) : q_(q), opt_(opt) {}

  FamilySystem run(const TreeNode& root) {
    node(root);
    if (opt_.merge_identical) out_.merge_identical();
    return std::move(out_);
  }

 private:
  void node(const TreeNode& n) {
    std::uint64_t p = n.prime;
    if (chains_.count(p)) throw Error(ErrorKind::Unsupported, "prime " + std::to_string(p) + " split again below its power branch");
    tmpl_.push(p);
    if (!n.children.empty() && std::holds_alternative<Power>(n.children[0])) {
      auto& pw = std::get<Power>(n.children[0]);
      Chain ch;
      ch.e0 = pw.start_exponent;
      ch.hi = std::max<std::uint32_t>(ch.e0, static_cast<std::uint32_t>(q_ - 1));
      auto it = digits_.find(p);
      if (it != digits_.end()) ch.prefix = it->second;
      Digits saved = ch.prefix;
      digits_.erase(p);
      chains_[p] = ch;
      terminal(p, pw);
      std::uint32_t pos = 1;
      for (std::size_t k = 1; k < n.children.size(); ++k) pos = chain_child(p, n.children[k], pos);
      chains_.erase(p);
      if (!saved.empty()) digits_[p] = std::move(saved);
    } else {
      std::uint32_t pos = 0;
      for (auto& c : n.children) {
        if (auto* l = std::get_if<Leaf>(&c)) {
          digits_[p].push_back(pos++);
          emit(tmpl_.resolve(l->retained));
          pop(p);
        } else if (auto* w = std::get_if<Wedge>(&c)) {
          for (auto& prod : tmpl_.products(*w)) {
            digits_[p].push_back(pos++);
            emit(prod);
            pop(p);
          }
        } else {
          digits_[p].push_back(pos++);
          node(*std::get<NodePtr>(c));
          pop(p);
        }
      }
    }
    tmpl_.pop(p);
  }

  std::uint32_t chain_child(std::uint64_t c, const Child& ch, std::uint32_t pos) {
    Chain& st = chains_[c];
    if (auto* l = std::get_if<Leaf>(&ch)) {
      st.pos = pos;
      emit(tmpl_.resolve(l->retained));
      return pos + 1;
    }
    if (auto* w = std::get_if<Wedge>(&ch)) {
      for (auto& prod : tmpl_.products(*w)) {
        chains_[c].pos = pos++;
        emit(prod);
      }
      return pos;
    }
    st.pos = pos;
    node(*std::get<NodePtr>(ch));
    return pos + 1;
  }

  void pop(std::uint64_t p) {
    auto it = digits_.find(p);
    it->second.pop_back();
    if (it->second.empty()) digits_.erase(it);
  }

  FamilyComponent chain_component(std::uint64_t c, const Chain& st) const {
    FamilyComponent fc;
    fc.prime = c;
    fc.lo = st.e0;
    fc.hi = st.hi;
    fc.prefix = st.prefix;
    fc.last = st.pos;
    return fc;
  }

  void terminal(std::uint64_t c, const Power& pw) {
    const Chain& st = chains_[c];
    for (std::uint32_t j = 0; j < q_; ++j) {
      CongruenceFamily f;
      if (pw.term == Termination::FullContext) {
        for (auto& [p, d] : digits_) f.comps.push_back(FamilyComponent::fixed(p, static_cast<std::uint32_t>(d.size()), d));
        for (auto& [p, other] : chains_) {
          if (p != c) f.comps.push_back(chain_component(p, other));
        }
      }
      if (j > 0) {
        Digits d(j, 0);
        for (std::uint32_t l = 0; l < j && l < st.prefix.size(); ++l) d[l] = st.prefix[l];
        f.comps.push_back(FamilyComponent::fixed(c, j, d));
      }
      f.comps.push_back(FamilyComponent::fixed(q_, 1, Digits{j}));
      add(std::move(f));
    }
  }

  void emit(const FactoredNat& mod) {
    CongruenceFamily f;
    for (auto [p, e] : mod.factors()) {
      if (auto ch = chains_.find(p); ch != chains_.end()) {
        const Chain& st = ch->second;
        if (e == st.e0) {
          f.comps.push_back(chain_component(p, st));
        } else if (e < st.e0) {
          f.comps.push_back(FamilyComponent::fixed(p, e, st.prefix));
        } else {
          throw Error(ErrorKind::StructureMismatch, "leaf retains " + std::to_string(p) + "^" + std::to_string(e) +
                                                        " inside a power branch of exponent " + std::to_string(st.e0));
        }
        continue;
      }
      auto it = digits_.find(p);
      std::size_t have = it == digits_.end() ? 0 : it->second.size();
      if (e > have) {
        throw Error(ErrorKind::StructureMismatch, "leaf retains " + std::to_string(p) + "^" + std::to_string(e) +
                                                      " but the path has only " + std::to_string(p) + "^" +
                                                      std::to_string(have));
      }
      f.comps.push_back(FamilyComponent::fixed(p, e, it->second));
    }
    add(std::move(f));
  }

  void add(CongruenceFamily f) {
    std::sort(f.comps.begin(), f.comps.end(), [](auto& a, auto& b) { return a.prime < b.prime; });
    out_.add(std::move(f));
  }

  std::uint64_t q_;
  ExpandOptions opt_;
  std::map<std::uint64_t, Digits> digits_;
  std::map<std::uint64_t, Chain> chains_;
  TemplatePath tmpl_;
  FamilySystem out_;
};

Natural raw_count(const TreeNode& n, std::uint64_t q) {
  Natural total = 0;
  const Power* pw = nullptr;
  for (auto& c : n.children) {
    if (auto* p = std::get_if<Power>(&c)) pw = p;
    else if (auto* sub = std::get_if<NodePtr>(&c)) total += raw_count(**sub, q);
    else total += effective_count(c);
  }
  if (!pw) return total;
  std::uint64_t copies = pw->start_exponent + 1 <= q ? q - pw->start_exponent : 1;
  return total * from_u64(copies) + from_u64(q);
}

class StructuralWalk {
 public:
  StructuralWalk(std::uint64_t q, bool force_q, StructuralReport& r) : q_(q), force_q_(force_q), r_(r) {}

  void node(const TreeNode& n, const std::string& path) {
    ++r_.nodes;
    std::uint64_t p = n.prime;
    if (!is_prime(p)) issue(ErrorKind::NonPrime, path, "node prime " + std::to_string(p) + " is not prime");
    if (p == q_ && !force_q_) issue(ErrorKind::QCollision, path, "node prime equals q");
    if (chain_.count(p)) issue(ErrorKind::Unsupported, path, "prime " + std::to_string(p) + " split again below its power branch");
    tmpl_.push(p);
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < n.children.size(); ++k) {
      const Child& c = n.children[k];
      std::string cp = path + "." + std::to_string(k);
      total += effective_count(c);
      if (auto* l = std::get_if<Leaf>(&c)) {
        ++r_.leaves;
        factors(l->retained, cp);
      } else if (auto* w = std::get_if<Wedge>(&c)) {
        r_.leaves += w->take;
        if (w->take == 0 || (w->optional.size() < 32 && w->take > (std::uint64_t{1} << w->optional.size()))) {
          issue(ErrorKind::WedgeTakeTooLarge, cp, "wedge takes " + std::to_string(w->take) + " products");
        }
        bool ok = factors(w->base, cp, false);
        for (auto& o : w->optional) ok = factors(o, cp, false) && ok;
        if (ok) {
          for (auto& prod : tmpl_.products(*w)) {
            for (auto& [fp, fe] : prod.factors()) {
              if (fe > tmpl_.get(fp)) {
                issue(ErrorKind::StructureMismatch, cp,
                      "wedge product " + prod.to_string() + " is not contained in the path (" + std::to_string(fp) +
                          "^" + std::to_string(tmpl_.get(fp)) + ")");
                break;
              }
            }
          }
        }
      } else if (auto* pw = std::get_if<Power>(&c)) {
        ++r_.power_branches;
        if (k != 0) issue(ErrorKind::StructureMismatch, cp, "power branch is not the leftmost child");
        if (pw->base != p) issue(ErrorKind::StructureMismatch, cp, "power base differs from the node prime");
        if (pw->start_exponent != tmpl_.get(p)) {
          issue(ErrorKind::StructureMismatch, cp,
                "power exponent " + std::to_string(pw->start_exponent) + " differs from the path exponent " +
                    std::to_string(tmpl_.get(p)));
        }
        if (pw->base == q_) issue(ErrorKind::Unsupported, cp, "power base equals q");
        chain_.insert(p);
      } else {
        node(*std::get<NodePtr>(c), cp);
      }
    }
    chain_.erase(p);
    if (total != p) {
      issue(ErrorKind::ChildCountMismatch, path,
            "node " + std::to_string(p) + " has " + std::to_string(total) + " children");
    }
    tmpl_.pop(p);
  }

 private:
  // Checks one factor list; containment is tested here only when asked.
  bool factors(const FactorList& l, const std::string& path, bool containment = true) {
    bool ok = true;
    if (l.empty() && containment) issue(ErrorKind::ModulusOne, path, "no retained factor");
    std::map<std::uint64_t, std::uint32_t> total;
    for (auto& f : l) {
      if (!is_prime(f.prime)) {
        issue(ErrorKind::NonPrimeFactor, path, std::to_string(f.prime) + " is not prime");
        ok = false;
        continue;
      }
      if (f.prime == q_ && !force_q_) issue(ErrorKind::QCollision, path, "factor prime equals q");
      std::uint32_t have = tmpl_.get(f.prime);
      if (f.path_ref && have == 0) {
        issue(ErrorKind::UnknownPathPrime, path, "@" + std::to_string(f.prime) + " is not on the path");
        ok = false;
        continue;
      }
      total[f.prime] += f.path_ref ? have : f.exponent;
    }
    if (!containment) return ok;
    for (auto& [p, e] : total) {
      std::uint32_t have = tmpl_.get(p);
      if (e > have) {
        issue(ErrorKind::StructureMismatch, path,
              std::to_string(p) + "^" + std::to_string(e) + " is not contained in the path (" + std::to_string(p) +
                  "^" + std::to_string(have) + ")");
      }
    }
    return ok;
  }

  void issue(ErrorKind k, const std::string& path, std::string msg) {
    r_.issues.push_back(StructuralIssue{k, path, std::move(msg)});
  }

  std::uint64_t q_;
  bool force_q_;
  StructuralReport& r_;
  TemplatePath tmpl_;
  std::set<std::uint64_t> chain_;
};

}  // namespace

CoveringSystem expand(const TreeSpec& t, std::uint64_t q, const ExpandOptions& opt) {
  check_q(t, q, opt.force_q);
  Natural raw = raw_leaf_count(t, q);
  if (raw > from_u64(opt.max_congruences) * 4) {
    throw Error(ErrorKind::ResourceBudgetExceeded,
                "expansion has " + raw.get_str() + " leaves, over the budget of " + std::to_string(opt.max_congruences));
  }
  return ConcreteWalk(q, opt).run(*t.root);
}

FamilySystem expand_families(const TreeSpec& t, std::uint64_t q, const ExpandOptions& opt) {
  check_q(t, q, false);
  return FamilyWalk(q, opt).run(*t.root);
}

std::uint64_t default_q(const TreeSpec& t) {
  if (t.declared_q) return *t.declared_q;
  std::set<std::uint64_t> ps;
  if (t.root) collect_primes(*t.root, ps);
  return next_prime(ps.empty() ? 2 : *ps.rbegin());
}

Natural raw_leaf_count(const TreeSpec& t, std::uint64_t q) {
  if (!t.root) return 0;
  return raw_count(*t.root, q);
}

std::string StructuralReport::summary() const {
  std::ostringstream os;
  os << (passed() ? "pass" : "fail") << ": " << nodes << " nodes, " << leaves << " leaves, " << power_branches
     << " power branches";
  for (auto& i : issues) os << "\n  " << kind_name(i.kind) << " at " << i.path << ": " << i.message;
  return os.str();
}

StructuralReport structural_verify(const TreeSpec& t, std::uint64_t q, bool force_q) {
  StructuralReport r;
  if (!t.root) {
    r.issues.push_back({ErrorKind::InvalidArgument, "root", "empty tree"});
    return r;
  }
  if (!is_prime(q)) r.issues.push_back({ErrorKind::NonPrime, "root", "q = " + std::to_string(q) + " is not prime"});
  StructuralWalk(q, force_q, r).node(*t.root, "root");
  return r;
}

}  // namespace covsys

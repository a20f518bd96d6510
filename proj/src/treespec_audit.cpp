#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "covsys/treespec.hpp"

namespace covsys {

namespace {

using Point = std::vector<std::uint32_t>;

FactoredNat modulus_at(const CongruenceFamily& f, const Point& pt) {
  std::vector<FactoredNat::Entry> e;
  for (std::size_t k = 0; k < f.comps.size(); ++k) e.emplace_back(f.comps[k].prime, pt[k]);
  return FactoredNat::from_factors(std::move(e));
}

// Calls fn on every exponent tuple of the box [lo_k, hi_k].
template <class Fn>
void for_each_point(const Point& lo, const Point& hi, Fn&& fn) {
  Point pt = lo;
  while (true) {
    fn(pt);
    std::size_t k = 0;
    for (; k < pt.size(); ++k) {
      if (pt[k] < hi[k]) {
        ++pt[k];
        break;
      }
      pt[k] = lo[k];
    }
    if (k == pt.size()) return;
  }
}

double log_size(const FactoredNat& m) {
  double l = 0;
  for (auto& [p, e] : m.factors()) l += e * std::log(static_cast<double>(p));
  return l;
}

// Builds the ordered map from sorted keys so each insert touches only its neighbour.
ModulusCounts ordered(std::unordered_map<FactoredNat, std::uint64_t, FactoredHash>&& in) {
  std::vector<std::pair<double, std::pair<FactoredNat, std::uint64_t>>> v;
  v.reserve(in.size());
  for (auto& kv : in) v.emplace_back(log_size(kv.first), std::move(kv));
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.first - b.first) > 1e-9 * std::max(a.first, b.first)) return a.first < b.first;
    return a.second.first < b.second.first;
  });
  ModulusCounts out;
  for (auto& [l, kv] : v) out.emplace_hint(out.end(), std::move(kv));
  return out;
}

struct Overlap {
  std::uint64_t families = 0;  // families whose box holds the point
  std::uint64_t residues = 0;  // distinct congruences among them
};

}  // namespace

AuditReport audit_families(const FamilySystem& input, std::uint64_t designated, const SymbolicAuditOptions& opt) {
  FamilySystem fs = input;
  fs.merge_identical();
  const auto& fam = fs.families();

  AuditReport r;
  r.designated = designated;
  std::map<std::vector<std::uint64_t>, std::vector<std::size_t>> buckets;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    buckets[fam[i].primes()].push_back(i);
    total += fam[i].size();
    for (auto& c : fam[i].comps) {
      if (c.prime == 2) r.all_odd = false;
      if (c.hi >= 2) r.all_square_free = false;
    }
  }

  // Moduli reached by two or more families, keyed by bucket and exponent tuple.
  std::unordered_map<FactoredNat, Overlap, FactoredHash> overlaps;
  std::uint64_t enumerated = 0;
  std::uint64_t dup_congruences = 0, dup_moduli = 0;
  for (auto& [primes, idx] : buckets) {
    std::map<Point, std::vector<std::size_t>> shared;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const auto& fa = fam[idx[a]];
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        const auto& fb = fam[idx[b]];
        Point lo(primes.size()), hi(primes.size());
        bool meet = true;
        std::uint64_t n = 1;
        for (std::size_t k = 0; k < primes.size() && meet; ++k) {
          lo[k] = std::max(fa.comps[k].lo, fb.comps[k].lo);
          hi[k] = std::min(fa.comps[k].hi, fb.comps[k].hi);
          meet = lo[k] <= hi[k];
          if (meet) n *= hi[k] - lo[k] + 1;
        }
        if (!meet) continue;
        enumerated += n;
        if (enumerated > opt.overlap_budget) {
          throw Error(ErrorKind::ResourceBudgetExceeded, "family overlaps exceed " + std::to_string(opt.overlap_budget) +
                                                             " moduli");
        }
        for_each_point(lo, hi, [&](const Point& pt) {
          auto& v = shared[pt];
          v.push_back(idx[a]);
          v.push_back(idx[b]);
        });
      }
    }
    for (auto& [pt, v] : shared) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      std::set<Natural> residues;
      for (auto i : v) residues.insert(fam[i].member(pt).residue());
      Overlap o{v.size(), residues.size()};
      dup_congruences += o.families - o.residues;
      dup_moduli += o.families - 1;
      overlaps.emplace(modulus_at(fam[v.front()], pt), o);
    }
  }

  r.congruence_count = total - dup_congruences;
  r.distinct_moduli = total - dup_moduli;
  for (auto& [m, o] : overlaps) {
    if (o.residues >= 2) r.distinct_except.emplace(m, o.residues);
  }

  FactoredNat d = FactoredNat::prime_power(designated, 1);
  if (auto it = overlaps.find(d); it != overlaps.end()) {
    r.designated_prime_count = it->second.residues;
  } else {
    for (auto& f : fam) {
      if (f.comps.size() == 1 && f.comps[0].prime == designated && f.comps[0].lo == 1) r.designated_prime_count = 1;
    }
  }

  if (r.distinct_moduli <= opt.multiplicity_cap) {
    std::unordered_map<FactoredNat, std::uint64_t, FactoredHash> mult;
    mult.reserve(r.distinct_moduli);
    for (auto& f : fam) {
      Point lo, hi;
      for (auto& c : f.comps) {
        lo.push_back(c.lo);
        hi.push_back(c.hi);
      }
      for_each_point(lo, hi, [&](const Point& pt) {
        FactoredNat m = modulus_at(f, pt);
        auto it = overlaps.find(m);
        mult[m] = it == overlaps.end() ? 1 : it->second.residues;
      });
    }
    r.multiplicity = ordered(std::move(mult));
  } else {
    r.multiplicity_complete = false;
    r.multiplicity = r.distinct_except;
  }
  return r;
}

AuditReport symbolic_audit(const TreeSpec& t, std::uint64_t q, std::uint64_t designated,
                           const SymbolicAuditOptions& opt) {
  if (!opt.force_q) {
    try {
      return audit_families(expand_families(t, q), designated, opt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unsupported) throw;
    }
  }
  ExpandOptions eo;
  eo.force_q = opt.force_q;
  eo.max_congruences = opt.expansion_budget;
  return audit(expand(t, q, eo), designated);
}

}  // namespace covsys

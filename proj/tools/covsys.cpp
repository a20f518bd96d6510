#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <functional>
#include <iostream>
#include <random>

#include "covsys/constructions.hpp"
#include "covsys/transforms.hpp"
#include "covsys/treespec.hpp"
#include "covsys/verifier.hpp"

using namespace covsys;
using nlohmann::json;

namespace {

enum Exit { kCovered = 0, kNotCovered = 1, kInputError = 2, kBudget = 3, kDisagree = 4 };

struct CliConfig {
  std::uint64_t brute_limit = kDefaultBruteLimit;
  std::uint64_t class_budget = SplitOptions{}.class_budget;
  std::string format = "text";
  bool force_q = false;
  std::uint64_t seed = 1;

  bool structured() const { return format == "structured"; }
  SplitOptions split() const {
    SplitOptions o;
    o.class_budget = class_budget;
    return o;
  }
};

struct Input {
  std::optional<CoveringSystem> system;
  std::optional<TreeSpec> tree;
};

bool looks_like_tree(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    } else if (text[i] == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else {
      break;
    }
  }
  auto rest = text.substr(i);
  return rest.starts_with("node") || rest.starts_with("q ");
}

Input load(const std::string& path) {
  std::string text = read_text_file(path);
  Input in;
  if (looks_like_tree(text)) {
    in.tree = parse_tree(text);
  } else {
    in.system = parse_any(text);
  }
  return in;
}

CoveringSystem load_system(const std::string& path) {
  auto in = load(path);
  if (!in.system) throw Error(ErrorKind::InvalidArgument, path + " holds a tree, expected congruences");
  return *in.system;
}

TreeSpec load_tree(const std::string& path) {
  auto in = load(path);
  if (!in.tree) throw Error(ErrorKind::InvalidArgument, path + " holds congruences, expected a tree");
  return *in.tree;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

json to_json(const CoverReport& r) {
  json j;
  j["verdict"] = r.covered() ? "Covered" : "NotCovered";
  if (r.lcm) j["lcm"] = r.lcm->value().get_str();
  if (r.witness_integer) j["witness"] = r.witness_integer->get_str();
  if (r.witness_class) j["witness_class"] = r.witness_class->to_string();
  j["classes_explored"] = r.stats.classes_explored;
  j["memo_hits"] = r.stats.memo_hits;
  j["max_depth"] = r.stats.max_depth;
  j["seconds"] = r.stats.elapsed_seconds;
  return j;
}

json to_json(const AuditReport& a) {
  json j;
  j["designated"] = a.designated;
  j["designated_count"] = a.designated_prime_count;
  j["congruences"] = a.congruence_count;
  j["distinct_moduli"] = a.distinct_moduli;
  j["all_odd"] = a.all_odd;
  j["all_square_free"] = a.all_square_free;
  j["distinct_apart_from_designated"] = a.distinct_apart_from_designated();
  json rep = json::object();
  for (auto& [m, n] : a.distinct_except) rep[m.to_string()] = n;
  j["repeated"] = rep;
  j["summary"] = describe(a);
  return j;
}

std::uint64_t q_for(const TreeSpec& t, std::uint64_t q) { return q ? q : default_q(t); }

FamilySystem families_of(const TreeSpec& t, std::uint64_t q, const CliConfig& cfg) {
  if (!cfg.force_q) {
    try {
      return expand_families(t, q);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unsupported) throw;
    }
  }
  ExpandOptions eo;
  eo.force_q = cfg.force_q;
  return FamilySystem::from_system(expand(t, q, eo));
}

CoveringSystem concrete_of(const TreeSpec& t, std::uint64_t q, const CliConfig& cfg) {
  ExpandOptions eo;
  eo.force_q = cfg.force_q;
  return expand(t, q, eo);
}

int report_cover(const CoverReport& r, const CliConfig& cfg) {
  if (cfg.structured()) {
    std::cout << to_json(r).dump(2) << "\n";
  } else {
    std::cout << describe(r) << "\n";
  }
  return r.covered() ? kCovered : kNotCovered;
}

// verify ------------------------------------------------------------------

int run_verify(const std::string& path, const std::string& mode, std::uint64_t q, const CliConfig& cfg) {
  auto in = load(path);
  auto brute = [&] {
    auto s = in.system ? *in.system : concrete_of(*in.tree, q_for(*in.tree, q), cfg);
    return brute_force_verify(s, cfg.brute_limit);
  };
  auto split = [&] {
    if (in.system) {
      auto r = split_verify(*in.system, cfg.split());
      return r;
    }
    return split_verify(families_of(*in.tree, q_for(*in.tree, q), cfg), cfg.split());
  };
  if (mode == "brute") return report_cover(brute(), cfg);
  if (mode == "split") return report_cover(split(), cfg);

  auto a = brute();
  auto b = split();
  if (a.covered() != b.covered()) {
    std::cerr << "disagreement: brute force says " << describe(a) << ", splitting says " << describe(b) << "\n";
    return kDisagree;
  }
  if (!a.covered() && first_covering(in.system ? *in.system : concrete_of(*in.tree, q_for(*in.tree, q), cfg),
                                     *b.witness_integer) >= 0) {
    std::cerr << "splitting witness " << b.witness_integer->get_str() << " is covered\n";
    return kDisagree;
  }
  return report_cover(a, cfg);
}

// build -------------------------------------------------------------------

int run_build(const std::string& name, std::uint64_t p, std::uint64_t q, const std::string& out, bool tree, bool dot,
              const CliConfig& cfg) {
  auto c = find_construction(name);
  if (!c) throw Error(ErrorKind::InvalidArgument, "unknown construction '" + name + "'");
  if (c->takes_p && !p) p = c->default_p;
  if (c->takes_q && !q) q = next_prime(std::max<std::uint64_t>(p, 19));
  auto t = build_tree(name, p, q);
  if (tree) {
    emit(print_tree(t), out);
    return kCovered;
  }
  if (dot) {
    emit(to_dot(t), out);
    return kCovered;
  }
  CoveringSystem s;
  if (name == "example") {
    s = example_system();
  } else {
    try {
      s = concrete_of(t, default_q(t), cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ResourceBudgetExceeded) throw;
      throw Error(e.kind(), std::string(e.what()) + "; use --tree and verify or audit the tree file instead");
    }
  }
  emit(cfg.structured() ? serialize_structured(s) : serialize_system(s), out);
  if (!out.empty()) std::cout << "wrote " << s.size() << " congruences to " << out << "\n";
  return kCovered;
}

// audit -------------------------------------------------------------------

int run_audit(const std::string& path, std::uint64_t designated, std::uint64_t q, const CliConfig& cfg) {
  auto in = load(path);
  AuditReport a;
  if (in.system) {
    a = audit(*in.system, designated);
  } else {
    SymbolicAuditOptions o;
    o.force_q = cfg.force_q;
    a = symbolic_audit(*in.tree, q_for(*in.tree, q), designated, o);
  }
  if (cfg.structured()) {
    std::cout << to_json(a).dump(2) << "\n";
  } else {
    std::cout << describe(a) << "\n";
  }
  return kCovered;
}

// transform ---------------------------------------------------------------

int finish_system(const CoveringSystem& s, const std::string& out, const CliConfig& cfg, json extra = json::object()) {
  auto r = split_verify(s, cfg.split());
  if (out.empty()) {
    std::cout << (cfg.structured() ? serialize_structured(s) : serialize_system(s));
  } else {
    write_text_file(out, cfg.structured() ? serialize_structured(s) : serialize_system(s));
  }
  std::ostream& log = out.empty() ? std::cerr : std::cout;
  if (cfg.structured()) {
    extra["congruences"] = s.size();
    extra["verification"] = to_json(r);
    log << extra.dump(2) << "\n";
  } else {
    log << s.size() << " congruences; " << describe(r) << "\n";
  }
  return r.covered() ? kCovered : kNotCovered;
}

int run_swap(const std::string& path, std::uint64_t p, std::uint64_t r1, std::uint64_t r2, const std::string& out,
             const CliConfig& cfg) {
  return finish_system(swap_residues(load_system(path), p, r1, r2), out, cfg);
}

int run_lift(const std::string& path, std::uint64_t p, std::uint64_t q, const std::string& out, const CliConfig& cfg) {
  auto res = lift_squarefree(load_system(path), p, q ? std::optional<std::uint64_t>(q) : std::nullopt);
  json extra;
  extra["q"] = res.q;
  std::ostream& log = out.empty() ? std::cerr : std::cout;
  bool inter_ok = true;
  for (auto& [xi, cx] : res.intermediates) {
    auto r = split_verify(cx, cfg.split());
    inter_ok = inter_ok && r.covered();
    if (cfg.structured()) {
      extra["intermediates"][std::to_string(xi)] = r.covered() ? "Covered" : "NotCovered";
    } else {
      log << "C_" << xi << ": " << describe(r) << "\n";
    }
  }
  if (!cfg.structured()) log << "q = " << res.q << "\n";
  int rc = finish_system(res.system, out, cfg, extra);
  return inter_ok ? rc : kNotCovered;
}

int run_rootswap(const std::string& path, std::uint64_t q, std::uint64_t power_q, const std::string& out,
                 const CliConfig& cfg) {
  auto t = load_tree(path);
  auto swapped = root_swap_coprime(t, q);
  emit(print_tree(swapped), out);
  std::uint64_t eq = power_q ? power_q : default_q(swapped);
  if (swapped.declared_q == std::nullopt && eq == q) eq = next_prime(eq);
  auto r = split_verify(families_of(swapped, eq, cfg), cfg.split());
  std::ostream& log = out.empty() ? std::cerr : std::cout;
  if (cfg.structured()) {
    log << to_json(r).dump(2) << "\n";
  } else {
    log << "expanded with q = " << eq << "; " << describe(r) << "\n";
  }
  return r.covered() ? kCovered : kNotCovered;
}

int run_rootswappow(const std::string& path, std::uint64_t p, std::uint64_t t, std::uint64_t q, const std::string& out,
                    const CliConfig& cfg) {
  return finish_system(root_swap_power(load_system(path), p, t, q), out, cfg);
}

// crosscheck --------------------------------------------------------------

CoveringSystem random_system(std::mt19937_64& rng) {
  static const std::vector<FactoredNat> divisors = [] {
    std::vector<FactoredNat> d;
    for (std::uint32_t a = 0; a <= 3; ++a)
      for (std::uint32_t b = 0; b <= 3; ++b)
        for (std::uint32_t c = 0; c <= 1; ++c)
          for (std::uint32_t e = 0; e <= 1; ++e) {
            if (a + b + c + e == 0) continue;
            d.push_back(FactoredNat::from_factors({{2, a}, {3, b}, {5, c}, {7, e}}));
          }
    return d;
  }();
  CoveringSystem s;
  std::size_t n = 3 + rng() % 30;
  for (std::size_t i = 0; i < n; ++i) {
    auto& m = divisors[rng() % divisors.size()];
    s.add(Congruence(Natural(static_cast<unsigned long>(rng() % m.value_u64())), m));
  }
  return s;
}

int run_crosscheck(std::uint64_t count, const CliConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uint64_t covered = 0, mismatches = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    auto s = random_system(rng);
    auto a = brute_force_verify(s, cfg.brute_limit);
    auto b = split_verify(s, cfg.split());
    bool ok = a.covered() == b.covered();
    if (ok && !b.covered()) ok = first_covering(s, *b.witness_integer) < 0;
    if (!ok) {
      ++mismatches;
      std::cerr << "mismatch on system " << i << ":\n" << serialize_system(s);
    }
    covered += a.covered();
  }
  if (cfg.structured()) {
    std::cout << json{{"systems", count}, {"covered", covered}, {"mismatches", mismatches}, {"seed", cfg.seed}}.dump(2)
              << "\n";
  } else {
    std::cout << count << " systems, " << covered << " covered, " << mismatches << " mismatches (seed " << cfg.seed
              << ")\n";
  }
  return mismatches ? kDisagree : kCovered;
}

// reproduce-table1 --------------------------------------------------------

struct RowOutcome {
  std::string status;  // PASS, FAIL or CITED
  std::string detail;
  double seconds = 0;
};

struct Row {
  std::string p;
  std::string bound;
  std::function<RowOutcome()> run;
};

RowOutcome check_tree(const TreeSpec& t, std::uint64_t q, std::uint64_t p, std::uint64_t count, const CliConfig& cfg) {
  bool structural = structural_verify(t, q).passed();
  auto fs = families_of(t, q, cfg);
  auto r = split_verify(fs, cfg.split());
  auto a = symbolic_audit(t, q, p);
  bool ok = structural && r.covered() && a.designated_prime_count == count && a.distinct_apart_from_designated() &&
            a.all_odd;
  std::string detail = std::string(structural ? "structure ok" : "structure FAILED") + "; " +
                       (r.covered() ? "Covered" : "NotCovered") + "; " + describe(a) + "; " +
                       std::to_string(a.congruence_count) + " congruences";
  return {ok ? "PASS" : "FAIL", detail, 0};
}

std::vector<Row> table_rows(std::uint64_t max_p, const CliConfig& cfg) {
  std::vector<Row> rows;
  rows.push_back({"3", "t_p <= 2", [] { return RowOutcome{"CITED", "earlier work; no construction here", 0}; }});
  rows.push_back({"5", "t_p <= 3", [] { return RowOutcome{"CITED", "earlier work; no construction here", 0}; }});
  rows.push_back({"7", "t_p <= 4", [&cfg] { return check_tree(four_sevens_tree(23), 23, 7, 4, cfg); }});
  rows.push_back({"11", "t_p <= 7", [&cfg] { return check_tree(seven_elevens_tree(23), 23, 11, 7, cfg); }});
  for (std::uint64_t p : {13, 17, 19}) {
    rows.push_back({std::to_string(p), "t_p <= " + std::to_string(p - 4), [p, &cfg] {
                      auto t = root_swap_coprime(seven_elevens_tree(23), p);
                      return check_tree(t, 23, p, p - 4, cfg);
                    }});
  }
  for (std::uint64_t p = 23; p <= max_p; p = next_prime(p)) {
    std::uint64_t q = next_prime(std::max<std::uint64_t>(p, 19));
    rows.push_back({std::to_string(p), "t_p <= " + std::to_string(p - 5),
                    [p, q, &cfg] { return check_tree(p_minus_five_tree(p, q), q, p, p - 5, cfg); }});
  }
  return rows;
}

int run_table(std::uint64_t max_p, const CliConfig& cfg) {
  bool all = true;
  json out = json::array();
  for (auto& row : table_rows(max_p, cfg)) {
    auto t0 = std::chrono::steady_clock::now();
    RowOutcome o;
    try {
      o = row.run();
    } catch (const Error& e) {
      o = {"FAIL", e.what(), 0};
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && o.status != "FAIL";
    if (cfg.structured()) {
      out.push_back({{"p", row.p}, {"bound", row.bound}, {"status", o.status}, {"detail", o.detail},
                     {"seconds", o.seconds}});
    } else {
      std::printf("%-6s %-10s %-6s %7.2fs  %s\n", row.p.c_str(), row.bound.c_str(), o.status.c_str(), o.seconds,
                  o.detail.c_str());
      std::fflush(stdout);
    }
  }
  if (cfg.structured()) std::cout << out.dump(2) << "\n";
  return all ? kCovered : kNotCovered;
}

int exit_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ResourceBudgetExceeded:
    case ErrorKind::LcmExceedsLimit:
      return kBudget;
    default:
      return kInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covering system toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  CliConfig cfg;
  app.add_option("--limit", cfg.brute_limit, "Largest lcm brute force will scan")->check(CLI::PositiveNumber);
  app.add_option("--class-budget", cfg.class_budget, "Residue classes the splitting verifier may visit")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "structured"}));
  app.add_flag("--force-q", cfg.force_q, "Allow q to coincide with a prime in the tree");
  app.add_option("--seed", cfg.seed, "Seed for randomized runs");

  std::string file, out, name, mode_flag;
  std::uint64_t p = 0, q = 0, r1 = 0, r2 = 0, t = 0, designated = 0, count = 1000, max_p = 23, power_q = 0;

  auto* verify = app.add_subcommand("verify", "Check that a covering or tree file covers the integers");
  verify->add_option("file", file)->required();
  bool brute = false, split = false, both = false;
  auto* fb = verify->add_flag("--brute", brute, "Scan every residue of the lcm");
  auto* fs = verify->add_flag("--split", split, "Residue class splitting (default)");
  auto* fo = verify->add_flag("--both", both, "Run both and compare");
  fb->excludes(fs)->excludes(fo);
  fs->excludes(fo);
  verify->add_option("--q", q, "q for power branches when the file is a tree");

  auto* build = app.add_subcommand("build", "Write one of the built-in constructions");
  build->add_option("name", name)->required()->check(CLI::IsMember({"example", "fig4", "six7", "four7", "seven11", "pminus5"}));
  build->add_option("--p", p);
  build->add_option("--q", q);
  build->add_option("-o,--output", out);
  bool as_tree = false, as_dot = false;
  build->add_flag("--tree", as_tree, "Write the tree DSL instead of congruences");
  build->add_flag("--dot", as_dot, "Write the tree as DOT");

  auto* aud = app.add_subcommand("audit", "Modulus multiplicities of a covering or tree file");
  aud->add_option("file", file)->required();
  aud->add_option("--designated", designated)->required();
  aud->add_option("--q", q, "q for power branches when the file is a tree");

  auto* tr = app.add_subcommand("transform", "Apply one transformation and verify the result");
  tr->require_subcommand(1);
  auto* sw = tr->add_subcommand("swap", "Exchange residues r1 and r2 mod p");
  sw->add_option("file", file)->required();
  sw->add_option("--p", p)->required();
  sw->add_option("--r1", r1)->required();
  sw->add_option("--r2", r2)->required();
  sw->add_option("-o,--output", out);
  auto* lf = tr->add_subcommand("lift", "Remove the second copy of modulus p");
  lf->add_option("file", file)->required();
  lf->add_option("--p", p)->required();
  lf->add_option("--q", q);
  lf->add_option("-o,--output", out);
  auto* rs = tr->add_subcommand("rootswap", "Move a tree's root prime p to a larger prime q");
  rs->add_option("file", file)->required();
  rs->add_option("--q", q)->required();
  rs->add_option("--power-q", power_q, "q used to expand power branches while verifying");
  rs->add_option("-o,--output", out);
  auto* rp = tr->add_subcommand("rootswappow", "Move the root classes mod p of a congruence list to q");
  rp->add_option("file", file)->required();
  rp->add_option("--p", p)->required();
  rp->add_option("--t", t)->required();
  rp->add_option("--q", q)->required();
  rp->add_option("-o,--output", out);

  auto* cc = app.add_subcommand("crosscheck", "Compare both verifiers on random systems");
  cc->add_option("--count", count)->check(CLI::PositiveNumber);

  auto* tab = app.add_subcommand("reproduce-table1", "Verify every constructive bound on t_p");
  tab->add_option("--max-p", max_p, "Check p - 5 for every prime from 23 up to this")->check(CLI::Range(23, 200));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (*verify) return run_verify(file, brute ? "brute" : both ? "both" : "split", q, cfg);
    if (*build) return run_build(name, p, q, out, as_tree, as_dot, cfg);
    if (*aud) return run_audit(file, designated, q, cfg);
    if (*sw) return run_swap(file, p, r1, r2, out, cfg);
    if (*lf) return run_lift(file, p, q, out, cfg);
    if (*rs) return run_rootswap(file, q, power_q, out, cfg);
    if (*rp) return run_rootswappow(file, p, t, q, out, cfg);
    if (*cc) return run_crosscheck(count, cfg);
    if (*tab) return run_table(max_p, cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

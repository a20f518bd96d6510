#include "covsys/covering.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace covsys {

void CoveringSystem::add(Congruence c, std::string label) {
  if (!label.empty() && labels_.size() < congruences_.size()) labels_.resize(congruences_.size());
  congruences_.push_back(std::move(c));
  if (!label.empty() || !labels_.empty()) {
    labels_.resize(congruences_.size());
    labels_.back() = std::move(label);
  }
}

FactoredNat CoveringSystem::lcm() const {
  FactoredNat l;
  for (auto& c : congruences_) l = l.lcm(c.modulus());
  return l;
}

bool CoveringSystem::has_modulus_one() const {
  for (auto& c : congruences_) {
    if (c.modulus().is_one()) return true;
  }
  return false;
}

bool AuditReport::distinct_apart_from_designated() const {
  for (auto& [m, n] : distinct_except) {
    if (!(m.prime_count() == 1 && m.factors()[0] == FactoredNat::Entry{designated, 1})) return false;
  }
  return true;
}

AuditReport audit(const CoveringSystem& s, std::uint64_t designated) {
  AuditReport r;
  r.designated = designated;
  std::unordered_map<FactoredNat, std::uint64_t, FactoredHash> counts;
  for (auto& c : s.congruences()) {
    ++counts[c.modulus()];
    if (c.modulus().has_prime(2)) r.all_odd = false;
    if (!c.modulus().square_free()) r.all_square_free = false;
  }
  for (auto& [m, n] : counts) {
    r.multiplicity.emplace(m, n);
    if (n >= 2) r.distinct_except.emplace(m, n);
  }
  r.congruence_count = s.size();
  r.distinct_moduli = counts.size();
  auto it = counts.find(FactoredNat::prime_power(designated, 1));
  r.designated_prime_count = it == counts.end() ? 0 : it->second;
  return r;
}

std::string describe(const AuditReport& r) {
  std::ostringstream os;
  bool first = true;
  for (auto& [m, n] : r.distinct_except) {
    if (!first) os << ", ";
    os << m.to_string() << "x" << n;
    first = false;
  }
  if (first) os << "no repeated moduli";
  else os << "; others distinct";
  os << "; odd " << (r.all_odd ? "yes" : "no");
  os << "; square-free " << (r.all_square_free ? "yes" : "no");
  return os.str();
}

DensityReport density(const CoveringSystem& s) {
  // Group by modulus so the rational sum stays small.
  std::unordered_map<FactoredNat, std::uint64_t, FactoredHash> counts;
  for (auto& c : s.congruences()) ++counts[c.modulus()];
  DensityReport d;
  d.harmonic_sum = 0;
  for (auto& [m, n] : counts) {
    d.harmonic_sum += Rational(from_u64(n), m.value());
    d.lcm = d.lcm.lcm(m);
  }
  d.harmonic_sum.canonicalize();
  return d;
}

namespace {

struct Cursor {
  std::string_view s;
  std::size_t i = 0;
  int line;
  int col0;

  int col() const { return col0 + static_cast<int>(i); }
  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
  }
  bool at_end() {
    skip_ws();
    return i >= s.size();
  }
  [[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::SyntaxError, msg, line, col()); }
  Natural number() {
    skip_ws();
    std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (start == i) fail("expected a number");
    return Natural(std::string(s.substr(start, i - start)));
  }
  void expect(char c) {
    skip_ws();
    if (i >= s.size() || s[i] != c) fail(std::string("expected '") + c + "'");
    ++i;
  }
  bool accept(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
};

}  // namespace

Congruence parse_congruence(std::string_view line, int line_no) {
  Cursor c{line, 0, line_no, 1};
  Natural r = c.number();
  c.expect('%');
  std::vector<FactoredNat::Entry> f;
  do {
    c.skip_ws();
    int col = c.col();
    Natural p = c.number();
    std::uint32_t e = 1;
    if (c.accept('^')) {
      Natural en = c.number();
      if (en < 1 || en > 100000) c.fail("exponent out of range");
      e = static_cast<std::uint32_t>(en.get_ui());
    }
    if (p == 1) throw Error(ErrorKind::ModulusOne, "factor 1 is not allowed", line_no, col);
    // Prime powers written out (9 for 3^2) are accepted; anything else is not.
    FactoredNat pf = fits_u64(p) && p > 1 ? factor(to_u64(p)) : FactoredNat{};
    if (pf.prime_count() != 1) {
      throw Error(ErrorKind::NonPrimeFactor, p.get_str() + " is not a prime power", line_no, col);
    }
    f.emplace_back(pf.factors()[0].first, pf.factors()[0].second * e);
  } while (c.accept('*'));
  if (!c.at_end()) c.fail("unexpected trailing text");
  FactoredNat m = FactoredNat::from_factors(std::move(f));
  if (m.is_one()) throw Error(ErrorKind::ModulusOne, "modulus must exceed 1", line_no, 1);
  if (r >= m.value()) {
    throw Error(ErrorKind::ResidueOutOfRange, "residue " + r.get_str() + " not below " + m.value().get_str(), line_no,
                1);
  }
  return Congruence(r, m);
}

CoveringSystem parse_system(std::string_view text) {
  CoveringSystem s;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    bool blank = true;
    for (char ch : line) {
      if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
    }
    if (!blank) s.add(parse_congruence(line, line_no));
    pos = nl + 1;
  }
  return s;
}

std::string serialize_system(const CoveringSystem& s) {
  std::string out;
  for (auto& c : s.congruences()) {
    out += c.to_string();
    out += '\n';
  }
  return out;
}

std::string serialize_structured(const CoveringSystem& s) {
  nlohmann::json doc;
  doc["congruences"] = nlohmann::json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    nlohmann::json e;
    e["residue"] = s[i].residue().get_str();
    nlohmann::json m = nlohmann::json::object();
    for (auto& [p, k] : s[i].modulus().factors()) m[std::to_string(p)] = k;
    e["modulus"] = m;
    if (!s.label(i).empty()) e["label"] = s.label(i);
    doc["congruences"].push_back(e);
  }
  return doc.dump(1) + "\n";
}

CoveringSystem parse_structured(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SyntaxError, e.what());
  }
  if (!doc.is_object() || !doc.contains("congruences") || !doc["congruences"].is_array()) {
    throw Error(ErrorKind::SyntaxError, "missing 'congruences' array");
  }
  CoveringSystem s;
  int idx = 0;
  for (auto& e : doc["congruences"]) {
    ++idx;
    try {
      Natural r(e.at("residue").get<std::string>());
      std::vector<FactoredNat::Entry> f;
      for (auto& [k, v] : e.at("modulus").items()) {
        Natural p(k);
        if (!fits_u64(p) || !is_prime(to_u64(p))) throw Error(ErrorKind::NonPrimeFactor, k + " is not prime", idx);
        f.emplace_back(to_u64(p), v.get<std::uint32_t>());
      }
      FactoredNat m = FactoredNat::from_factors(std::move(f));
      if (m.is_one()) throw Error(ErrorKind::ModulusOne, "modulus must exceed 1", idx);
      std::string label = e.contains("label") ? e["label"].get<std::string>() : std::string();
      s.add(Congruence(r, m), label);
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorKind::SyntaxError, std::string("entry ") + std::to_string(idx) + ": " + ex.what());
    } catch (const std::invalid_argument&) {
      throw Error(ErrorKind::SyntaxError, "entry " + std::to_string(idx) + ": bad decimal string");
    }
  }
  return s;
}

CoveringSystem parse_any(std::string_view text) {
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (ch == '{') return parse_structured(text);
    break;
  }
  return parse_system(text);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text;
}

CoveringSystem read_system_file(const std::string& path) { return parse_any(read_text_file(path)); }

}  // namespace covsys

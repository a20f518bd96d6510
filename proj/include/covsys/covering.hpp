#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "covsys/arith.hpp"

namespace covsys {

class CoveringSystem {
 public:
  CoveringSystem() = default;
  explicit CoveringSystem(std::vector<Congruence> cs) : congruences_(std::move(cs)) {}

  // Modulus 1 is allowed here and stands for the universal class.
  void add(Congruence c, std::string label = {});

  const std::vector<Congruence>& congruences() const { return congruences_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(std::size_t i) const { return i < labels_.size() ? labels_[i] : std::string(); }
  std::size_t size() const { return congruences_.size(); }
  bool empty() const { return congruences_.empty(); }
  const Congruence& operator[](std::size_t i) const { return congruences_[i]; }

  FactoredNat lcm() const;
  bool has_modulus_one() const;

  // Labels are excluded.
  friend bool operator==(const CoveringSystem& a, const CoveringSystem& b) {
    return a.congruences_ == b.congruences_;
  }

 private:
  std::vector<Congruence> congruences_;
  std::vector<std::string> labels_;
};

using ModulusCounts = std::map<FactoredNat, std::uint64_t>;

struct AuditReport {
  std::uint64_t designated = 0;
  // Complete only when multiplicity_complete; symbolic audits of huge expansions skip it.
  ModulusCounts multiplicity;
  bool multiplicity_complete = true;
  std::uint64_t congruence_count = 0;
  std::uint64_t distinct_moduli = 0;
  bool all_odd = true;
  bool all_square_free = true;
  ModulusCounts distinct_except;
  std::uint64_t designated_prime_count = 0;

  // Only the designated prime repeats, and nothing else does.
  bool distinct_apart_from_designated() const;
};

AuditReport audit(const CoveringSystem& s, std::uint64_t designated);
// "7x6; others distinct; odd yes; square-free yes"
std::string describe(const AuditReport& r);

struct DensityReport {
  Rational harmonic_sum;
  FactoredNat lcm;
};

DensityReport density(const CoveringSystem& s);

Congruence parse_congruence(std::string_view line, int line_no = 0);
CoveringSystem parse_system(std::string_view text);
std::string serialize_system(const CoveringSystem& s);

std::string serialize_structured(const CoveringSystem& s);
CoveringSystem parse_structured(std::string_view text);

// Picks the structured reader when the first non-blank character is '{'.
CoveringSystem parse_any(std::string_view text);
CoveringSystem read_system_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace covsys

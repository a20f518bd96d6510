#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covsys/covering.hpp"
#include "covsys/treespec.hpp"

namespace covsys {

// The ten congruences 1%2, 1%3, 2%6, 3%9, 0%5, 6%10, 12%15, 18%30, 9%45, 24%90.
CoveringSystem example_system();
// Condensed tree whose expansion is example_system().
TreeSpec example_tree();

// 3-power branch with Minimal termination; expand with q = p.
TreeSpec fig4_tree(std::uint64_t p);

TreeSpec six_sevens_tree();
TreeSpec four_sevens_tree(std::uint64_t q);
TreeSpec seven_elevens_tree(std::uint64_t q);
TreeSpec p_minus_five_tree(std::uint64_t p, std::uint64_t q);

struct Construction {
  std::string name;
  bool takes_p;
  bool takes_q;
  std::uint64_t default_p;
  // Designated prime; 0 means p itself.
  std::uint64_t designated;
};

const std::vector<Construction>& constructions();
std::optional<Construction> find_construction(const std::string& name);

// Dispatches on the CLI name; p and q are ignored where they do not apply.
TreeSpec build_tree(const std::string& name, std::uint64_t p, std::uint64_t q);

}  // namespace covsys

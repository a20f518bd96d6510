#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "covsys/covering.hpp"
#include "covsys/treespec.hpp"

namespace covsys {

// Exchanges the roles of r1 and r2 mod p in the p-part of every residue.
// Moduli are untouched; congruences whose modulus is prime to p are copied.
CoveringSystem swap_residues(const CoveringSystem& s, std::uint64_t p, std::uint64_t r1, std::uint64_t r2);

struct LiftResult {
  CoveringSystem system;
  std::uint64_t q = 0;
  // Input after moving its two modulus-p congruences to residues 0 and 1.
  CoveringSystem normalized;
  // xi -> the system of p-free congruences plus the xi-part with p divided out.
  std::map<std::uint64_t, CoveringSystem> intermediates;
};

LiftResult lift_squarefree(const CoveringSystem& c0, std::uint64_t p, std::optional<std::uint64_t> q = std::nullopt);

// Root p-node with leaves [p] and subtrees becomes a q-node with q-t leaves.
// Primes p and q trade places everywhere else; former q-nodes keep their
// first p children. Wedges come out as explicit leaves.
TreeSpec root_swap_coprime(const TreeSpec& t, std::uint64_t q);

// Root classes carried by congruences of modulus exactly p become q-t classes
// mod q; the rest move through j + p*k -> j' + q*k.
CoveringSystem root_swap_power(const CoveringSystem& s, std::uint64_t p, std::uint64_t t, std::uint64_t q);

}  // namespace covsys

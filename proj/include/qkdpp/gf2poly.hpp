#pragma once

#include <cstdint>

namespace qkdpp::gf2 {

// Polynomials over GF(2) with degree <= 63, coefficient i in bit i.

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t mod, int deg);
std::uint64_t powmod_x2k(std::uint64_t base, int k, std::uint64_t mod, int deg);  // base^(2^k) mod
std::uint64_t gcd(std::uint64_t a, std::uint64_t b);
int degree(std::uint64_t p);

// Tests f (with bit deg set) for irreducibility over GF(2).
bool is_irreducible(std::uint64_t f, int deg);

// First irreducible monic polynomial of the given degree found by counting up
// from the seed's low bits. Deterministic in (seed, deg). deg in [1, 63].
std::uint64_t irreducible_from_seed(std::uint64_t seed, int deg);

}  // namespace qkdpp::gf2

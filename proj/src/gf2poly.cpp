#include "qkdpp/gf2poly.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace qkdpp::gf2 {

int degree(std::uint64_t p) {
    return p == 0 ? -1 : 63 - std::countl_zero(p);
}

namespace {

std::uint64_t polymod(std::uint64_t a, std::uint64_t b) {
    const int db = degree(b);
    for (int da = degree(a); da >= db; da = degree(a)) a ^= b << (da - db);
    return a;
}

std::uint64_t reduce128(std::uint64_t hi, std::uint64_t lo, std::uint64_t mod, int deg) {
    for (int bit = 126; bit >= deg; --bit) {
        const bool set = bit >= 64 ? ((hi >> (bit - 64)) & 1) : ((lo >> bit) & 1);
        if (!set) continue;
        const int sh = bit - deg;
        if (sh >= 64) {
            hi ^= mod << (sh - 64);
        } else {
            lo ^= mod << sh;
            if (sh) hi ^= mod >> (64 - sh);
        }
    }
    return lo;
}

// Squaring over GF(2) spreads the bits apart; table-driven per byte.
struct SpreadTable {
    std::uint16_t t[256];
    SpreadTable() {
        for (int b = 0; b < 256; ++b) {
            std::uint16_t v = 0;
            for (int i = 0; i < 8; ++i)
                if (b & (1 << i)) v |= static_cast<std::uint16_t>(1u << (2 * i));
            t[b] = v;
        }
    }
};
const SpreadTable kSpread;

std::uint64_t spread32(std::uint32_t v) {
    return static_cast<std::uint64_t>(kSpread.t[v & 0xff]) |
           (static_cast<std::uint64_t>(kSpread.t[(v >> 8) & 0xff]) << 16) |
           (static_cast<std::uint64_t>(kSpread.t[(v >> 16) & 0xff]) << 32) |
           (static_cast<std::uint64_t>(kSpread.t[(v >> 24) & 0xff]) << 48);
}

std::uint64_t sqrmod(std::uint64_t a, std::uint64_t mod, int deg) {
    return reduce128(spread32(static_cast<std::uint32_t>(a >> 32)),
                     spread32(static_cast<std::uint32_t>(a)), mod, deg);
}

}  // namespace

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
    while (b) {
        a = polymod(a, b);
        std::swap(a, b);
    }
    return a;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t mod, int deg) {
    std::uint64_t lo = 0, hi = 0;
    for (int i = 0; i < 64; ++i) {
        if ((b >> i) & 1) {
            lo ^= a << i;
            if (i) hi ^= a >> (64 - i);
        }
    }
    return reduce128(hi, lo, mod, deg);
}

std::uint64_t powmod_x2k(std::uint64_t base, int k, std::uint64_t mod, int deg) {
    std::uint64_t r = base;
    for (int i = 0; i < k; ++i) r = sqrmod(r, mod, deg);
    return r;
}

bool is_irreducible(std::uint64_t f, int deg) {
    if (deg <= 0) return false;
    if (deg == 1) return true;
    if ((f & 1) == 0) return false;  // divisible by x
    const std::uint64_t x = 2;
    // Screen for small-degree factors first: gcd(x^(2^i) - x, f) != 1
    // catches any factor of degree dividing i, rejecting most candidates
    // after a handful of squarings.
    std::uint64_t h = x;
    const int screen = std::min(4, deg - 1);
    for (int i = 1; i <= screen; ++i) {
        h = sqrmod(h, f, deg);
        if (gcd(h ^ x, f) != 1) return false;
    }
    // x^(2^deg) == x (mod f), and x^(2^(deg/p)) - x coprime to f for primes p | deg.
    if (powmod_x2k(x, deg, f, deg) != x) return false;
    int n = deg;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        while (n % p == 0) n /= p;
        const std::uint64_t g = powmod_x2k(x, deg / p, f, deg) ^ x;
        if (gcd(g, f) != 1) return false;
    }
    if (n > 1) {
        const std::uint64_t g = powmod_x2k(x, deg / n, f, deg) ^ x;
        if (gcd(g, f) != 1) return false;
    }
    return true;
}

std::uint64_t irreducible_from_seed(std::uint64_t seed, int deg) {
    if (deg < 1 || deg > 63) throw std::invalid_argument("irreducible_from_seed: degree out of range");
    if (deg == 1) return 0b11;
    const std::uint64_t middle_mask = ((std::uint64_t{1} << (deg - 1)) - 1) << 1;
    for (std::uint64_t c = 0;; ++c) {
        const std::uint64_t f = (std::uint64_t{1} << deg) | ((seed + c) << 1 & middle_mask) | 1;
        if (is_irreducible(f, deg)) return f;
    }
}

}  // namespace qkdpp::gf2

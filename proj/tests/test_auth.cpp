#include <doctest.h>

#include <random>

#include "qkdpp/auth.hpp"
#include "qkdpp/gf2poly.hpp"

using namespace qkdpp;

TEST_CASE("irreducible polynomials from seeds") {
    std::mt19937_64 rng(3);
    for (const int deg : {2, 3, 8, 17, 40, 63}) {
        for (int trial = 0; trial < 10; ++trial) {
            const std::uint64_t f = gf2::irreducible_from_seed(rng(), deg);
            CHECK(gf2::degree(f) == deg);
            CHECK(gf2::is_irreducible(f, deg));
        }
    }
    // x^2 + x + 1 is the only irreducible quadratic
    CHECK(gf2::irreducible_from_seed(0, 2) == 0b111);
}

TEST_CASE("tag length formula") {
    // |m| = 2^19, gamma = 2^-20 -> k = log2(2 * 2^19 * 2^20) = 40
    CHECK(auth_tag_len(1u << 19, std::pow(2.0, -20)) == 40);
    CHECK(auth_tag_len(0, 0.5) == 2);  // empty message clamps |m| to 1
}

TEST_CASE("auth round trip accepts and reports net cost k") {
    std::mt19937_64 rng(11);
    const double gamma = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        KeyPool sender = KeyPool::random(4096, rng);
        KeyPool receiver = sender;
        const BitString m = BitString::random(64 + rng() % 512, rng);
        const std::size_t k = auth_tag_len(m.size(), gamma);
        const AuthResult res = auth_tag(sender, m, gamma);
        CHECK(res.consumed_bits == k);
        CHECK(res.tag.tag.size() == k);
        CHECK(auth_verify(receiver, m, res.tag));
        CHECK(sender.available() == receiver.available());
    }
}

TEST_CASE("desynchronized pools reject") {
    std::mt19937_64 rng(13);
    KeyPool sender = KeyPool::random(4096, rng);
    KeyPool receiver = KeyPool::random(4096, rng);  // different pool
    const BitString m = BitString::random(100, rng);
    const AuthResult res = auth_tag(sender, m, 1e-6);
    CHECK_FALSE(auth_verify(receiver, m, res.tag));
}

TEST_CASE("pool exhaustion raises a distinct error") {
    std::mt19937_64 rng(17);
    KeyPool tiny = KeyPool::random(10, rng);
    CHECK_THROWS_AS(auth_tag(tiny, BitString::random(100, rng), 1e-6), pool_exhausted);
}

TEST_CASE("single-bit forgery acceptance stays below 2 gamma") {
    // Monte-Carlo oracle over fresh pool randomness; gamma chosen large so
    // the bound is measurable at 1e5 trials.
    std::mt19937_64 rng(19);
    const double gamma = 1.0 / 64.0;
    const std::size_t mlen = 256;
    const int trials = 100000;
    int accepted = 0;
    for (int t = 0; t < trials; ++t) {
        KeyPool sender = KeyPool::random(512, rng);
        KeyPool receiver = sender;
        BitString m = BitString::random(mlen, rng);
        const AuthResult res = auth_tag(sender, m, gamma);
        BitString forged = m;
        forged.set(t % mlen, !forged.get(t % mlen));
        if (auth_verify(receiver, forged, res.tag)) ++accepted;
    }
    const double rate = static_cast<double>(accepted) / trials;
    CHECK(rate <= 2.0 * gamma);
}

TEST_CASE("lfsr toeplitz is linear in the message") {
    std::mt19937_64 rng(23);
    const std::size_t k = 24;
    const BitString desc = BitString::random(2 * k, rng);
    for (int trial = 0; trial < 200; ++trial) {
        const BitString a = BitString::random(300, rng);
        const BitString b = BitString::random(300, rng);
        CHECK(lfsr_toeplitz(desc, k, a ^ b) == (lfsr_toeplitz(desc, k, a) ^ lfsr_toeplitz(desc, k, b)));
    }
}

#include "qkdpp/auth.hpp"

#include <bit>
#include <cmath>

#include "qkdpp/gf2poly.hpp"

namespace qkdpp {

KeyPool::KeyPool(const BitString& bits) {
    for (std::size_t i = 0; i < bits.size(); ++i) bits_.push_back(bits.get(i));
}

KeyPool KeyPool::random(std::size_t nbits, std::mt19937_64& rng) {
    return KeyPool(BitString::random(nbits, rng));
}

BitString KeyPool::draw(std::size_t n) {
    if (bits_.size() < n) throw pool_exhausted("key pool exhausted");
    BitString out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.set(i, bits_.front());
        bits_.pop_front();
    }
    consumed_ += n;
    return out;
}

void KeyPool::reallocate(const BitString& b) {
    for (std::size_t i = 0; i < b.size(); ++i) bits_.push_back(b.get(i));
    consumed_ -= b.size();
}

std::size_t auth_tag_len(std::size_t message_len, double gamma_au) {
    const double m = static_cast<double>(message_len == 0 ? 1 : message_len);
    return static_cast<std::size_t>(std::ceil(std::log2(2.0 * m / gamma_au)));
}

static std::uint64_t bits_to_u64(const BitString& b) {
    return b.size() == 0 ? 0 : b.words()[0];
}

// Toeplitz matrix generated by a LFSR: column i is the register state after i
// steps, so the tag is the XOR of the states at the message's set bits.
static std::uint64_t lfsr_toeplitz_hash(std::uint64_t poly, int k, std::uint64_t state,
                                        const BitString& m) {
    const std::uint64_t mask = (k == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
    const std::uint64_t taps = poly & mask;  // feedback from the monic polynomial
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.get(i)) acc ^= state;
        const std::uint64_t fb = std::popcount(state & taps) & 1u;
        state = (state >> 1) | (fb << (k - 1));
    }
    return acc & mask;
}

struct LfsrKey {
    std::uint64_t poly = 0;
    std::uint64_t state = 0;
    int k = 0;
};

// 2k description bits: k select the irreducible feedback polynomial, k the
// initial state (forced nonzero).
static LfsrKey derive_key(const BitString& matrix_bits, int k) {
    LfsrKey key;
    key.k = k;
    const BitString poly_seed = matrix_bits.slice(0, k);
    const BitString state_bits = matrix_bits.slice(k, k);
    key.poly = gf2::irreducible_from_seed(bits_to_u64(poly_seed), k);
    key.state = bits_to_u64(state_bits);
    if (key.state == 0) key.state = 1;
    return key;
}

BitString lfsr_toeplitz(const BitString& description, std::size_t k, const BitString& m) {
    if (description.size() != 2 * k) throw std::invalid_argument("lfsr_toeplitz: need 2k description bits");
    if (k < 1 || k > 63) throw std::invalid_argument("lfsr_toeplitz: k out of range");
    const LfsrKey key = derive_key(description, static_cast<int>(k));
    const std::uint64_t raw = lfsr_toeplitz_hash(key.poly, key.k, key.state, m);
    BitString tag(k);
    for (std::size_t i = 0; i < k; ++i) tag.set(i, (raw >> i) & 1);
    return tag;
}

AuthResult auth_tag(KeyPool& pool, const BitString& m, double gamma_au) {
    const std::size_t k = auth_tag_len(m.size(), gamma_au);
    if (k > 63) throw std::invalid_argument("auth_tag: tag length above 63 bits unsupported");
    const std::size_t before = pool.consumed();
    const BitString matrix_bits = pool.draw(2 * k);
    const BitString otp = pool.draw(k);
    BitString tag = lfsr_toeplitz(matrix_bits, k, m);
    tag ^= otp;
    pool.reallocate(matrix_bits);
    return AuthResult{AuthTag{std::move(tag), m.size(), gamma_au}, pool.consumed() - before};
}

bool auth_verify(KeyPool& pool, const BitString& m, const AuthTag& tag) {
    if (tag.message_len != m.size()) return false;
    AuthResult expected;
    try {
        expected = auth_tag(pool, m, tag.error_bound);
    } catch (const pool_exhausted&) {
        return false;
    }
    return expected.tag.tag == tag.tag;
}

}  // namespace qkdpp

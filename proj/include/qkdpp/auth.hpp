#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>

#include "qkdpp/bitstring.hpp"

namespace qkdpp {

struct pool_exhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Pre-shared secret bits between one Alice unit and one Bob unit. Bits are
// drawn from the front; the 2k bits that build an authentication matrix stay
// secret and are reallocated to the back, so each message costs k bits net.
class KeyPool {
public:
    KeyPool() = default;
    explicit KeyPool(const BitString& bits);
    static KeyPool random(std::size_t nbits, std::mt19937_64& rng);

    std::size_t available() const { return bits_.size(); }
    std::size_t consumed() const { return consumed_; }

    BitString draw(std::size_t n);        // consumes n bits
    void reallocate(const BitString& b);  // returns still-secret bits to the back

private:
    std::deque<bool> bits_;
    std::size_t consumed_ = 0;
};

struct AuthTag {
    BitString tag;               // encrypted k-bit tag
    std::size_t message_len = 0;
    double error_bound = 0.0;    // gamma_AU the tag was built for
};

// k = ceil(log2(2|m| / gamma_AU)); |m| is clamped to 1 for empty messages.
std::size_t auth_tag_len(std::size_t message_len, double gamma_au);

// k-bit LFSR-Toeplitz hash of an arbitrary-length message. The description
// holds 2k bits: k select an irreducible feedback polynomial, k the initial
// register state. Linear over GF(2) in the message.
BitString lfsr_toeplitz(const BitString& description, std::size_t k, const BitString& m);

// LFSR-Toeplitz tag over the message, one-time-padded with k fresh pool bits.
// Draws 3k bits and reallocates the 2k matrix bits; reports net consumption.
struct AuthResult {
    AuthTag tag;
    std::size_t consumed_bits = 0;
};
AuthResult auth_tag(KeyPool& pool, const BitString& m, double gamma_au);

// Recomputes the tag with the receiver's pool state; accept iff equal.
bool auth_verify(KeyPool& pool, const BitString& m, const AuthTag& tag);

}  // namespace qkdpp

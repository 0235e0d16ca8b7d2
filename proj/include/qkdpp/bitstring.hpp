#pragma once

#include <cstdint>
#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qkdpp {

// Packed bit string over GF(2). Bit 0 is the first transmitted bit and lives
// in the lowest bit of word 0 (little-endian within bytes). XOR of strings of
// unequal length pads the shorter one with trailing zeros.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t nbits) : nbits_(nbits), words_(word_count(nbits), 0) {}

    static BitString random(std::size_t nbits, std::mt19937_64& rng);
    // Parses "0101..." (leftmost char is bit 0).
    static BitString from_bits(std::string_view bits);
    // Parses the "len:hexpayload" serialization.
    static BitString from_hex(std::string_view text);

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (v) words_[i >> 6] |= mask; else words_[i >> 6] &= ~mask;
    }

    void resize(std::size_t nbits);
    void append_bit(bool v);
    void append(const BitString& other);

    BitString slice(std::size_t begin, std::size_t len) const;
    // Projection onto the given bit positions, in order.
    BitString select(std::span<const std::uint32_t> positions) const;
    // Projection onto positions where mask is 1 (mask may be shorter).
    BitString select_mask(const BitString& mask) const;

    std::size_t popcount() const;

    BitString& operator^=(const BitString& other);
    friend BitString operator^(BitString a, const BitString& b) { a ^= b; return a; }
    bool operator==(const BitString& other) const = default;

    std::string to_bits() const;
    // "len:hexpayload", lowercase hex, bytes in transmission order.
    std::string to_hex() const;

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

    static std::size_t word_count(std::size_t nbits) { return (nbits + 63) / 64; }

private:
    void clear_tail();

    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

// dst ^= window of `src` starting at bit `offset`, `nbits` bits long.
// dst must hold at least `nbits` bits; the window must lie inside src.
void xor_shifted_window(std::span<std::uint64_t> dst, std::size_t nbits,
                        std::span<const std::uint64_t> src, std::size_t offset);

}  // namespace qkdpp

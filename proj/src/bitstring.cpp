#include "qkdpp/bitstring.hpp"

#include <bit>
#include <stdexcept>

namespace qkdpp {

void BitString::clear_tail() {
    const std::size_t tail = nbits_ & 63;
    if (tail != 0 && !words_.empty())
        words_.back() &= (std::uint64_t{1} << tail) - 1;
}

BitString BitString::random(std::size_t nbits, std::mt19937_64& rng) {
    BitString out(nbits);
    for (auto& w : out.words_) w = rng();
    out.clear_tail();
    return out;
}

BitString BitString::from_bits(std::string_view bits) {
    BitString out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') out.set(i, true);
        else if (bits[i] != '0') throw std::invalid_argument("BitString::from_bits: bad char");
    }
    return out;
}

void BitString::resize(std::size_t nbits) {
    nbits_ = nbits;
    words_.resize(word_count(nbits), 0);
    clear_tail();
}

void BitString::append_bit(bool v) {
    resize(nbits_ + 1);
    set(nbits_ - 1, v);
}

void BitString::append(const BitString& other) {
    const std::size_t offset = nbits_;
    resize(nbits_ + other.nbits_);
    if (other.nbits_ == 0) return;
    if ((offset & 63) == 0) {
        std::size_t w0 = offset >> 6;
        for (std::size_t i = 0; i < other.words_.size(); ++i) words_[w0 + i] |= other.words_[i];
    } else {
        for (std::size_t i = 0; i < other.nbits_; ++i)
            if (other.get(i)) set(offset + i, true);
    }
}

BitString BitString::slice(std::size_t begin, std::size_t len) const {
    if (begin + len > nbits_) throw std::out_of_range("BitString::slice");
    BitString out(len);
    xor_shifted_window(out.words(), len, words(), begin);
    return out;
}

BitString BitString::select(std::span<const std::uint32_t> positions) const {
    BitString out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (get(positions[i])) out.set(i, true);
    return out;
}

BitString BitString::select_mask(const BitString& mask) const {
    BitString out;
    out.words_.reserve(word_count(nbits_));
    std::size_t n = std::min(nbits_, mask.size());
    for (std::size_t i = 0; i < n; ++i)
        if (mask.get(i)) out.append_bit(get(i));
    return out;
}

std::size_t BitString::popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
}

BitString& BitString::operator^=(const BitString& other) {
    if (other.nbits_ > nbits_) resize(other.nbits_);
    for (std::size_t i = 0; i < other.words_.size(); ++i) words_[i] ^= other.words_[i];
    clear_tail();
    return *this;
}

std::string BitString::to_bits() const {
    std::string s(nbits_, '0');
    for (std::size_t i = 0; i < nbits_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

std::string BitString::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s = std::to_string(nbits_) + ":";
    const std::size_t nbytes = (nbits_ + 7) / 8;
    s.reserve(s.size() + 2 * nbytes);
    for (std::size_t b = 0; b < nbytes; ++b) {
        const std::uint8_t byte = (words_[b >> 3] >> ((b & 7) * 8)) & 0xff;
        s.push_back(digits[byte >> 4]);
        s.push_back(digits[byte & 0xf]);
    }
    return s;
}

static int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw std::invalid_argument("BitString::from_hex: bad hex digit");
}

BitString BitString::from_hex(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("BitString::from_hex: missing length prefix");
    const std::size_t nbits = std::stoull(std::string(text.substr(0, colon)));
    const auto payload = text.substr(colon + 1);
    if (payload.size() != 2 * ((nbits + 7) / 8))
        throw std::invalid_argument("BitString::from_hex: payload length mismatch");
    BitString out(nbits);
    for (std::size_t b = 0; b * 2 < payload.size(); ++b) {
        const std::uint64_t byte =
            (static_cast<std::uint64_t>(hex_val(payload[2 * b])) << 4) | hex_val(payload[2 * b + 1]);
        out.words_[b >> 3] |= byte << ((b & 7) * 8);
    }
    out.clear_tail();
    return out;
}

void xor_shifted_window(std::span<std::uint64_t> dst, std::size_t nbits,
                        std::span<const std::uint64_t> src, std::size_t offset) {
    if (nbits == 0) return;
    const std::size_t nwords = (nbits + 63) / 64;
    const std::size_t w0 = offset >> 6;
    const unsigned sh = offset & 63;
    if (sh == 0) {
        for (std::size_t i = 0; i < nwords; ++i) dst[i] ^= src[w0 + i];
    } else {
        const std::size_t last_src = (offset + nbits - 1) >> 6;
        for (std::size_t i = 0; i < nwords; ++i) {
            std::uint64_t w = src[w0 + i] >> sh;
            if (w0 + i + 1 <= last_src) w |= src[w0 + i + 1] << (64 - sh);
            dst[i] ^= w;
        }
    }
    const std::size_t tail = nbits & 63;
    if (tail != 0) dst[nwords - 1] &= (std::uint64_t{1} << tail) - 1;
}

}  // namespace qkdpp

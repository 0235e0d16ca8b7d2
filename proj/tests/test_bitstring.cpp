#include <doctest.h>

#include <random>

#include "qkdpp/bitstring.hpp"

using namespace qkdpp;

TEST_CASE("xor pads the shorter operand with trailing zeros") {
    CHECK((BitString::from_bits("1010") ^ BitString::from_bits("1010")) == BitString::from_bits("0000"));
    CHECK((BitString::from_bits("1010") ^ BitString::from_bits("0000")) == BitString::from_bits("1010"));
    CHECK((BitString::from_bits("11") ^ BitString::from_bits("1010")) == BitString::from_bits("0110"));
}

TEST_CASE("xor is self-inverse on the common prefix") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t la = rng() % 200, lb = rng() % 200;
        const BitString a = BitString::random(la, rng);
        const BitString b = BitString::random(lb, rng);
        const BitString back = (a ^ b) ^ b;
        CHECK(back.slice(0, la) == a);
    }
}

TEST_CASE("hex serialization round trip") {
    std::mt19937_64 rng(3);
    for (const std::size_t len : {0u, 1u, 7u, 8u, 9u, 63u, 64u, 65u, 200u}) {
        const BitString a = BitString::random(len, rng);
        const std::string hex = a.to_hex();
        CHECK(BitString::from_hex(hex) == a);
        CHECK(hex.substr(0, hex.find(':')) == std::to_string(len));
    }
    CHECK(BitString::from_bits("1").to_hex() == "1:01");
    CHECK(BitString::from_bits("10000001").to_hex() == "8:81");
}

TEST_CASE("slice and select agree with per-bit access") {
    std::mt19937_64 rng(11);
    const BitString a = BitString::random(300, rng);
    const BitString s = a.slice(65, 130);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.get(i) == a.get(65 + i));

    std::vector<std::uint32_t> pos{0, 5, 64, 65, 128, 299};
    const BitString sel = a.select(pos);
    REQUIRE(sel.size() == pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) CHECK(sel.get(i) == a.get(pos[i]));

    BitString mask(300);
    for (auto p : pos) mask.set(p, true);
    CHECK(a.select_mask(mask) == sel);
}

TEST_CASE("append keeps bit order") {
    std::mt19937_64 rng(5);
    BitString a = BitString::random(67, rng);
    const BitString b = BitString::random(31, rng);
    BitString joined = a;
    joined.append(b);
    REQUIRE(joined.size() == 98);
    for (std::size_t i = 0; i < 67; ++i) CHECK(joined.get(i) == a.get(i));
    for (std::size_t i = 0; i < 31; ++i) CHECK(joined.get(67 + i) == b.get(i));
}

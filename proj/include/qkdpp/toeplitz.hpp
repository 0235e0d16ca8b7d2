#pragma once

#include "qkdpp/bitstring.hpp"

namespace qkdpp {

// 2-universal hash from the Toeplitz family. The matrix has output_len rows
// and input_len columns; entry (r, c) is seed[input_len - 1 + r - c], so the
// seed must hold input_len + output_len - 1 bits.
struct ToeplitzHash {
    BitString seed;
    std::size_t input_len = 0;
    std::size_t output_len = 0;

    static ToeplitzHash from_seed(BitString seed, std::size_t input_len, std::size_t output_len);
};

// Word-packed kernel, single thread. Reference for the parallel path.
BitString toeplitz_apply_serial(const ToeplitzHash& h, const BitString& m);

// Same result; splits the message range across OpenMP threads with per-thread
// accumulators and an XOR reduction, so the output is bit-exact regardless of
// the thread count.
BitString toeplitz_apply(const ToeplitzHash& h, const BitString& m);

}  // namespace qkdpp

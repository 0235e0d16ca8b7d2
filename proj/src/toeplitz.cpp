#include "qkdpp/toeplitz.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qkdpp {

ToeplitzHash ToeplitzHash::from_seed(BitString seed, std::size_t input_len, std::size_t output_len) {
    if (seed.size() != input_len + output_len - 1)
        throw std::invalid_argument("ToeplitzHash: seed length must be input_len + output_len - 1");
    return ToeplitzHash{std::move(seed), input_len, output_len};
}

// Output bit r = XOR over set message bits c of seed[input_len - 1 + r - c].
// Each set bit c contributes the output_len-wide seed window starting at
// input_len - 1 - c, so the whole product is a sum of shifted windows.
static void accumulate_windows(std::span<std::uint64_t> acc, const ToeplitzHash& h,
                               const BitString& m, std::size_t c_begin, std::size_t c_end) {
    const auto words = m.words();
    for (std::size_t c = c_begin; c < c_end;) {
        const std::uint64_t w = words[c >> 6] >> (c & 63);
        if (w == 0) {
            c = ((c >> 6) + 1) << 6;
            continue;
        }
        const std::size_t step = std::countr_zero(w);
        c += step;
        if (c >= c_end) break;
        xor_shifted_window(acc, h.output_len, h.seed.words(), h.input_len - 1 - c);
        ++c;
    }
}

BitString toeplitz_apply_serial(const ToeplitzHash& h, const BitString& m) {
    if (m.size() != h.input_len)
        throw std::invalid_argument("toeplitz_apply: message length mismatch");
    BitString out(h.output_len);
    accumulate_windows(out.words(), h, m, 0, m.size());
    return out;
}

BitString toeplitz_apply(const ToeplitzHash& h, const BitString& m) {
    if (m.size() != h.input_len)
        throw std::invalid_argument("toeplitz_apply: message length mismatch");
#ifdef _OPENMP
    // Parallelism only pays off once both dimensions are large.
    if (h.input_len >= 1u << 14 && h.output_len >= 1u << 10) {
        BitString out(h.output_len);
        const std::size_t nwords = BitString::word_count(h.output_len);
#pragma omp parallel
        {
            std::vector<std::uint64_t> local(nwords, 0);
            const int nt = omp_get_num_threads();
            const int id = omp_get_thread_num();
            const std::size_t chunk = (m.size() + nt - 1) / nt;
            const std::size_t b = std::min<std::size_t>(id * chunk, m.size());
            const std::size_t e = std::min<std::size_t>(b + chunk, m.size());
            accumulate_windows(local, h, m, b, e);
#pragma omp critical
            {
                auto w = out.words();
                for (std::size_t i = 0; i < nwords; ++i) w[i] ^= local[i];
            }
        }
        return out;
    }
#endif
    return toeplitz_apply_serial(h, m);
}

}  // namespace qkdpp

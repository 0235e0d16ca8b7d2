#include "qkdpp/vss.hpp"

#include <algorithm>
#include <stdexcept>

namespace qkdpp {

bool VssConfig::member(int share, int party) const {
    const auto& s = sigma[share];
    return std::binary_search(s.begin(), s.end(), party);
}

long long binomial_coefficient(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

namespace {

// All t-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> subsets_lex(int n, int t) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(t);
    for (int i = 0; i < t; ++i) cur[i] = i;
    if (t == 0) return {std::vector<int>{}};
    while (true) {
        out.push_back(cur);
        int i = t - 1;
        while (i >= 0 && cur[i] == n - t + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < t; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

std::vector<int> complement_of(const std::vector<int>& sub, int n) {
    std::vector<int> out;
    out.reserve(n - sub.size());
    std::size_t k = 0;
    for (int p = 0; p < n; ++p) {
        if (k < sub.size() && sub[k] == p) ++k;
        else out.push_back(p);
    }
    return out;
}

}  // namespace

VssConfig make_vss_config(CorruptionModel model, int t) {
    if (t < 0) throw std::invalid_argument("make_vss_config: t must be nonnegative");
    if (!is_collaborative(model) && t < 2)
        throw std::invalid_argument("make_vss_config: non-collaborative models need t >= 2");
    VssConfig cfg;
    cfg.model = model;
    cfg.t = t;
    switch (model) {
        case CorruptionModel::AC: {
            cfg.n = 3 * t + 1;
            const auto subs = subsets_lex(cfg.n, t);
            cfg.q = static_cast<int>(subs.size());
            for (const auto& s : subs) cfg.sigma.push_back(complement_of(s, cfg.n));
            cfg.redundancy = 2 * t + 1;
            cfg.shares_per_party = static_cast<int>(binomial_coefficient(cfg.n - 1, t));
            break;
        }
        case CorruptionModel::AN: {
            cfg.n = 2 * t + 2;
            cfg.q = cfg.n;
            for (int i = 0; i < cfg.n; ++i) cfg.sigma.push_back(complement_of({i}, cfg.n));
            cfg.redundancy = 2 * t + 1;
            cfg.shares_per_party = cfg.n - 1;
            break;
        }
        case CorruptionModel::PC: {
            cfg.n = t + 1;
            cfg.q = cfg.n;
            for (int i = 0; i < cfg.n; ++i) cfg.sigma.push_back({i});
            cfg.redundancy = 1;
            cfg.shares_per_party = 1;
            break;
        }
        case CorruptionModel::PN: {
            cfg.n = 2;
            cfg.q = 2;
            cfg.sigma = {{0}, {1}};
            cfg.redundancy = 1;
            cfg.shares_per_party = 1;
            break;
        }
    }
    return cfg;
}

ResourceRow resource_row(CorruptionModel model, int t) {
    if (t < 0) throw std::invalid_argument("resource_row: t must be nonnegative");
    switch (model) {
        case CorruptionModel::AC:
            return ResourceRow{3LL * t + 1, 2LL * t + 1, binomial_coefficient(3 * t, t)};
        case CorruptionModel::AN:
            return ResourceRow{2LL * t + 2, 2LL * t + 1, 2LL * t + 1};
        case CorruptionModel::PC:
            return ResourceRow{t + 1LL, 1, 1};
        case CorruptionModel::PN:
            return ResourceRow{2, 1, 1};
    }
    throw std::logic_error("resource_row: bad model");
}

std::vector<BitString> split_shares(const BitString& m, int q, std::mt19937_64& rng) {
    if (q < 1) throw std::invalid_argument("split_shares: q must be >= 1");
    std::vector<BitString> shares;
    shares.reserve(q);
    BitString last = m;
    for (int i = 0; i < q - 1; ++i) {
        shares.push_back(BitString::random(m.size(), rng));
        last ^= shares.back();
    }
    shares.push_back(std::move(last));
    return shares;
}

}  // namespace qkdpp

#include "qkdpp/protocol.hpp"

#include <algorithm>
#include <stdexcept>

#include "qkdpp/stat_bounds.hpp"
#include "qkdpp/toeplitz.hpp"

namespace qkdpp {

namespace {

// --- little field codec: 32-bit length prefix, then payload ----------------

void put_field(BitString& buf, const BitString& f) {
    BitString len(32);
    for (int i = 0; i < 32; ++i) len.set(i, (f.size() >> i) & 1u);
    buf.append(len);
    buf.append(f);
}

BitString get_field(const BitString& buf, std::size_t& pos) {
    std::size_t len = 0;
    for (int i = 0; i < 32; ++i) len |= static_cast<std::size_t>(buf.get(pos + i)) << i;
    pos += 32;
    BitString f = buf.slice(pos, len);
    pos += len;
    return f;
}

BitString encode_u64(std::uint64_t v) {
    BitString b(64);
    for (int i = 0; i < 64; ++i) b.set(i, (v >> i) & 1u);
    return b;
}

std::uint64_t decode_u64(const BitString& b) {
    std::uint64_t v = 0;
    for (int i = 0; i < 64 && i < static_cast<int>(b.size()); ++i)
        v |= static_cast<std::uint64_t>(b.get(i)) << i;
    return v;
}

BitString encode_sym2(const std::vector<std::uint8_t>& v) {
    BitString b(2 * v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        b.set(2 * i, v[i] & 1u);
        b.set(2 * i + 1, (v[i] >> 1) & 1u);
    }
    return b;
}

std::vector<std::uint8_t> decode_sym2(const BitString& b) {
    std::vector<std::uint8_t> v(b.size() / 2);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = static_cast<std::uint8_t>(b.get(2 * i) | (b.get(2 * i + 1) << 1));
    return v;
}

// --- per-pair source data ---------------------------------------------------

struct PairData {
    BitString raw_az, raw_bz;  // VSS dealer inputs (Z-basis raw keys)
    BitString info_a, info_b;  // non-private protocol information
};

PairData prepare_pair_mdi(const MdiRounds& r) {
    PairData d;
    std::vector<std::uint8_t> a_succ, b_succ, out_succ;
    BitString ra_x, rb_x;
    for (std::size_t i = 0; i < r.outcome.size(); ++i) {
        if (r.outcome[i] == 0) continue;
        if (r.a_int[i] == 0) d.raw_az.append_bit(r.r_a.get(i));
        else ra_x.append_bit(r.r_a.get(i));
        if (r.b_int[i] == 0) d.raw_bz.append_bit(r.r_b.get(i));
        else rb_x.append_bit(r.r_b.get(i));
        a_succ.push_back(r.a_int[i]);
        b_succ.push_back(r.b_int[i]);
        out_succ.push_back(r.outcome[i]);
    }
    put_field(d.info_a, encode_sym2(a_succ));
    put_field(d.info_a, ra_x);
    put_field(d.info_b, encode_sym2(out_succ));
    put_field(d.info_b, encode_sym2(b_succ));
    put_field(d.info_b, rb_x);
    return d;
}

PairData prepare_pair_bb84(const Bb84Rounds& r) {
    PairData d;
    BitString k_a(r.basis_a.size()), c(r.detected.size()), kb_c, ra_x, rb_x;
    for (std::size_t i = 0; i < r.detected.size(); ++i) {
        k_a.set(i, r.basis_a[i]);
        c.set(i, r.detected[i]);
        if (r.basis_a[i] == 0) d.raw_az.append_bit(r.r_a.get(i));
        else ra_x.append_bit(r.r_a.get(i));
        if (r.detected[i]) {
            kb_c.append_bit(r.basis_b[i]);
            if (r.basis_b[i] == 0) d.raw_bz.append_bit(r.r_b.get(i));
            else rb_x.append_bit(r.r_b.get(i));
        }
    }
    put_field(d.info_a, k_a);
    put_field(d.info_a, encode_sym2(std::vector<std::uint8_t>(r.a_int.begin(), r.a_int.end())));
    put_field(d.info_a, ra_x);
    put_field(d.info_b, c);
    put_field(d.info_b, kb_c);
    put_field(d.info_b, rb_x);
    return d;
}

// --- sifting/PE view computed by Bob's sigma_1 units from the info pair -----

struct SiftView {
    // per Z-coincidence entry: positions inside r_A|Z and r_B|Z
    std::vector<std::uint32_t> az_positions, bz_positions;
    std::vector<std::uint8_t> z_intensity;  // BB84: Alice's intensity per entry
    std::size_t az_len = 0, bz_len = 0;     // |r_A restricted to Z| and |r_B ...|
    MdiObservables mdi_obs;
    Bb84Observables bb84_obs;
};

SiftView sift_view_mdi(const BitString& info_a, const BitString& info_b) try {
    SiftView v;
    std::size_t pos = 0;
    const auto a_succ = decode_sym2(get_field(info_a, pos));
    const BitString ra_x = get_field(info_a, pos);
    pos = 0;
    const auto out_succ = decode_sym2(get_field(info_b, pos));
    const auto b_succ = decode_sym2(get_field(info_b, pos));
    const BitString rb_x = get_field(info_b, pos);
    if (a_succ.size() != b_succ.size() || a_succ.size() != out_succ.size())
        return v;  // malformed info; empty view leads to a sift abort

    std::size_t ia_z = 0, ib_z = 0, ia_x = 0, ib_x = 0;
    for (std::size_t i = 0; i < a_succ.size(); ++i) {
        const int a = a_succ[i], b = b_succ[i];
        if (a == 0 && b == 0) {
            v.az_positions.push_back(static_cast<std::uint32_t>(ia_z));
            v.bz_positions.push_back(static_cast<std::uint32_t>(ib_z));
        } else if (a != 0 && b != 0 && ia_x < ra_x.size() && ib_x < rb_x.size()) {
            v.mdi_obs.x_sizes[a - 1][b - 1] += 1.0;
            // psi- flips Bob's bit, so agreeing raw bits are an error there;
            // psi+ errs when the raw bits differ.
            const bool err = (ra_x.get(ia_x) == rb_x.get(ib_x)) == (out_succ[i] == 2);
            if (err) v.mdi_obs.x_errors[a - 1][b - 1] += 1.0;
        }
        if (a == 0) ++ia_z;
        else ++ia_x;
        if (b == 0) ++ib_z;
        else ++ib_x;
    }
    v.az_len = ia_z;
    v.bz_len = ib_z;
    v.mdi_obs.z_size = static_cast<double>(v.az_positions.size());
    return v;
} catch (const std::out_of_range&) {
    return SiftView{};  // unparseable info from a corrupted module
}

SiftView sift_view_bb84(const BitString& info_a, const BitString& info_b) try {
    SiftView v;
    std::size_t pos = 0;
    const BitString k_a = get_field(info_a, pos);
    const auto a_int = decode_sym2(get_field(info_a, pos));
    const BitString ra_x = get_field(info_a, pos);
    pos = 0;
    const BitString c = get_field(info_b, pos);
    const BitString kb_c = get_field(info_b, pos);
    const BitString rb_x = get_field(info_b, pos);
    if (k_a.size() != c.size() || a_int.size() != c.size()) return v;

    std::size_t ia_z = 0, ia_x = 0, ib_z = 0, ib_x = 0, ic = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const bool basis_a = k_a.get(i);  // 0 = Z, 1 = X
        if (c.get(i)) {
            const bool basis_b = kb_c.get(ic);
            if (!basis_a && !basis_b) {
                v.az_positions.push_back(static_cast<std::uint32_t>(ia_z));
                v.bz_positions.push_back(static_cast<std::uint32_t>(ib_z));
                v.z_intensity.push_back(a_int[i]);
            } else if (basis_a && basis_b && ia_x < ra_x.size() && ib_x < rb_x.size()) {
                v.bb84_obs.x_sizes[a_int[i]] += 1.0;
                if (ra_x.get(ia_x) != rb_x.get(ib_x)) v.bb84_obs.x_errors[a_int[i]] += 1.0;
            }
            if (!basis_b) ++ib_z;
            else ++ib_x;
            ++ic;
        }
        if (!basis_a) ++ia_z;
        else ++ia_x;
    }
    v.az_len = ia_z;
    v.bz_len = ib_z;
    return v;
} catch (const std::out_of_range&) {
    return SiftView{};  // unparseable info from a corrupted module
}

// Deterministic M-subset of {0..n-1} from a common random seed, ascending.
std::vector<std::uint32_t> select_subset(std::uint64_t seed, std::size_t n, std::size_t m) {
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> d(i, n - 1);
        std::swap(idx[i], idx[d(rng)]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

BitString mask_from_positions(std::size_t len, const std::vector<std::uint32_t>& entries,
                              const std::vector<std::uint32_t>& positions) {
    BitString mask(len);
    for (const std::uint32_t e : entries) mask.set(positions[e], true);
    return mask;
}

// --- orchestration helpers ---------------------------------------------------

struct Ctx {
    Session* s = nullptr;
    const ProtocolOptions* opt = nullptr;
    int n_q = 0;
    std::size_t block = 0;  // M

    LabId other(LabId lab) const { return lab == LabId::Alice ? LabId::Bob : LabId::Alice; }

    std::vector<PartyId> sigma1(LabId lab) const {
        std::vector<PartyId> out;
        for (int u : s->sigma1_units()) out.push_back(unit_id(lab, u));
        return out;
    }
    std::vector<PartyId> non_sigma1(LabId lab) const {
        std::vector<PartyId> out;
        const auto& s1 = s->sigma1_units();
        for (int u = 0; u < s->config().n_c; ++u)
            if (!std::binary_search(s1.begin(), s1.end(), u)) out.push_back(unit_id(lab, u));
        return out;
    }
    PartyId first_honest_sigma1(LabId lab) const {
        for (const PartyId p : sigma1(lab))
            if (!s->is_active_corrupted(p)) return p;
        return sigma1(lab).front();
    }
};

// Distribute a value from a module to the sigma_1 units and run the pairwise
// consistency test on it. Returns per-unit received copies.
std::map<PartyId, BitString> distribute_info(Ctx& c, PartyId module, LabId lab,
                                             const BitString& info, const std::string& phase) {
    std::map<PartyId, BitString> copies;
    const Behavior* mb = c.s->behavior(module);
    for (const PartyId u : c.sigma1(lab)) {
        BitString crafted = info;
        if (mb != nullptr && mb->inconsistent_deal && c.s->is_active_corrupted(u) && crafted.size() > 0)
            crafted.set(0, !crafted.get(0));
        copies[u] = c.s->send_secure(phase, module, u, "info", crafted);
    }
    // pairwise consistency among sigma_1 members
    const auto members = c.sigma1(lab);
    for (std::size_t x = 0; x < members.size() && !c.s->aborted(); ++x)
        for (std::size_t y = x + 1; y < members.size() && !c.s->aborted(); ++y)
            for (auto [from, to] : {std::pair{members[x], members[y]}, std::pair{members[y], members[x]}}) {
                BitString declared = copies[from];
                const Behavior* fb = c.s->behavior(from);
                if (fb != nullptr && fb->is_active() && fb->echo_in_consistency) declared = info;
                const BitString got =
                    c.s->send_secure(phase + "/consistency", from, to, "info-consistency", declared);
                if (!c.s->is_active_corrupted(to) && got != copies[to]) {
                    c.s->raise_abort(to, phase + "/consistency");
                    break;
                }
            }
    return copies;
}

// sigma_1 -> rest of the lab, each receiver majority-voting its R copies.
BitString forward_and_vote(Ctx& c, LabId lab, const BitString& value, const std::string& phase,
                           const std::string& msg_class) {
    BitString agreed = value;
    for (const PartyId to : c.non_sigma1(lab)) {
        std::vector<BitString> copies;
        for (const PartyId from : c.sigma1(lab))
            copies.push_back(c.s->send_secure(phase, from, to, msg_class, value));
        const BitString mv = c.s->majority_vote(copies, value.size());
        if (!c.s->is_active_corrupted(to)) agreed = mv;
    }
    return agreed;
}

// Lab-to-lab redundant delivery: every sigma_1 sender forwards its own copy
// to every sigma_1 receiver, which majority-votes. Empty optional on abort.
std::optional<BitString> cross_lab(Ctx& c, LabId from_lab,
                                   const std::function<const BitString&(PartyId)>& copy_of,
                                   const std::string& phase, const std::string& msg_class) {
    std::map<PartyId, std::vector<BitString>> received;
    std::size_t len = 0;
    for (const PartyId from : c.sigma1(from_lab)) {
        const BitString& value = copy_of(from);
        len = std::max(len, value.size());
        for (const PartyId to : c.sigma1(c.other(from_lab))) {
            const auto got = c.s->send_authenticated(phase, from, to, msg_class, value);
            if (!got) return std::nullopt;  // auth failure already aborted
            received[to].push_back(*got);
        }
    }
    BitString agreed;
    for (auto& [to, copies] : received) {
        const BitString mv = c.s->majority_vote(copies, len);
        if (!c.s->is_active_corrupted(to)) agreed = mv;
    }
    return agreed;
}

// Concatenate the per-pair shares into shares of the concatenated string.
void build_concatenated(Ctx& c, LabId lab, const std::string& stem, const std::string& out_label) {
    const VssConfig& cfg = c.s->unit_vss();
    for (int i = 0; i < cfg.q; ++i)
        for (int p : cfg.sigma[i]) {
            const PartyId holder = unit_id(lab, p);
            BitString concat;
            for (int j = 0; j < c.n_q; ++j) {
                const BitString* v = c.s->find_share(holder, stem + std::to_string(j), i);
                if (v != nullptr) concat.append(*v);
            }
            c.s->store_share(holder, out_label, i, std::move(concat));
        }
}

ProtocolResult finish_aborted(const Session& s) {
    ProtocolResult r;
    r.aborted = true;
    r.abort_phase = s.abort_state().phase;
    r.auth_bits_consumed = s.pool_consumed();
    return r;
}

}  // namespace

BitString finalize_key(Session& s, LabId lab, const std::string& label) {
    const VssConfig& cfg = s.unit_vss();
    BitString key;
    std::size_t len = 0;
    for (int i = 0; i < cfg.q; ++i)
        for (int p : cfg.sigma[i]) {
            const BitString* v = s.find_share(unit_id(lab, p), label, i);
            if (v != nullptr) len = std::max(len, v->size());
        }
    for (int i = 0; i < cfg.q; ++i) {
        std::vector<BitString> copies;
        for (int p : cfg.sigma[i]) {
            const PartyId holder = unit_id(lab, p);
            BitString v = *s.find_share(holder, label, i);
            const Behavior* b = s.behavior(holder);
            if (b != nullptr && b->lie_in_reconstruct && v.size() > 0) v.set(0, !v.get(0));
            copies.push_back(std::move(v));
        }
        key ^= s.majority_vote(copies, len);
    }
    return key;
}

ProtocolResult run_protocol(const DeploymentConfig& deploy, const ProtocolInputs& inputs,
                            const ChannelParams& params, const AdversaryScript& script,
                            std::uint64_t seed, const ProtocolOptions& opt) {
    Session s(deploy, seed);
    return run_protocol(s, inputs, params, script, opt);
}

ProtocolResult run_protocol(Session& s, const ProtocolInputs& inputs, const ChannelParams& params,
                            const AdversaryScript& script, const ProtocolOptions& opt) {
    const DeploymentConfig& deploy = s.config();
    s.inject(script);

    Ctx c{&s, &opt, deploy.n_q, static_cast<std::size_t>(inputs.block_size)};
    const bool mdi = inputs.scheme == Scheme::MDI;
    const std::size_t M = c.block;

    // Quantum phase: transmission rounds sized so each sifted key reaches M.
    std::uint64_t rounds;
    if (mdi) {
        const MdiGains gains = mdi_gain_and_error(params, inputs);
        rounds = rounds_for_blocksize(static_cast<double>(M), gains.g_zz, 5e-3 / deploy.n_q);
    } else {
        const Bb84Gains gains = bb84_gain_and_error(params, inputs);
        rounds = rounds_for_blocksize(static_cast<double>(M),
                                      gains.g_zz[0] + gains.g_zz[1] + gains.g_zz[2],
                                      5e-3 / deploy.n_q);
    }

    std::vector<PairData> pairs;
    for (int j = 0; j < deploy.n_q; ++j) {
        if (mdi) pairs.push_back(prepare_pair_mdi(mdi_sample_rounds(params, inputs, rounds, s.rng())));
        else pairs.push_back(prepare_pair_bb84(bb84_sample_rounds(params, inputs, rounds, s.rng())));
    }

    // Step 1: distribution of data.
    std::vector<std::map<PartyId, BitString>> info_a_at_a(deploy.n_q);
    std::vector<std::map<PartyId, BitString>> info_b_at_b(deploy.n_q);
    for (int j = 0; j < deploy.n_q; ++j) {
        const std::string js = std::to_string(j);
        // a module with the short-deal behavior distributes a truncated key
        for (const LabId lab : {LabId::Alice, LabId::Bob}) {
            const Behavior* mb = s.behavior(module_id(lab, j));
            BitString& raw = lab == LabId::Alice ? pairs[j].raw_az : pairs[j].raw_bz;
            if (mb != nullptr && mb->short_rbs_deal && raw.size() > 0) raw.resize(raw.size() - 1);
        }
        if (!vss_share(s, module_id(LabId::Alice, j), LabId::Alice, "rA" + js, pairs[j].raw_az))
            return finish_aborted(s);
        if (!vss_share(s, module_id(LabId::Bob, j), LabId::Bob, "rB" + js, pairs[j].raw_bz))
            return finish_aborted(s);
        info_a_at_a[j] = distribute_info(c, module_id(LabId::Alice, j), LabId::Alice,
                                         pairs[j].info_a, "info-a" + js);
        if (s.aborted()) return finish_aborted(s);
        info_b_at_b[j] = distribute_info(c, module_id(LabId::Bob, j), LabId::Bob, pairs[j].info_b,
                                         "info-b" + js);
        if (s.aborted()) return finish_aborted(s);
    }

    // Step 2: sifting. Alice's sigma_1 units forward their info copies; each
    // of Bob's sigma_1 units majority-votes and computes the index sets.
    std::vector<SiftView> views(deploy.n_q);
    std::vector<BitString> mask_a(deploy.n_q), mask_b(deploy.n_q);
    for (int j = 0; j < deploy.n_q; ++j) {
        const std::string js = std::to_string(j);
        const auto agreed = cross_lab(
            c, LabId::Alice,
            [&](PartyId p) -> const BitString& { return info_a_at_a[j].at(p); },
            "sift-info" + js, "lab-info");
        if (!agreed) return finish_aborted(s);
        const PartyId ref = c.first_honest_sigma1(LabId::Bob);
        const BitString& info_b_ref = info_b_at_b[j].at(ref);
        views[j] = mdi ? sift_view_mdi(*agreed, info_b_ref) : sift_view_bb84(*agreed, info_b_ref);
        if (views[j].az_positions.size() < M) {
            s.raise_abort(ref, "sift/blocksize");
            return finish_aborted(s);
        }
        const auto rbs = rbs_generate(s, LabId::Bob, 64, "rbs-sift" + js);
        if (!rbs) return finish_aborted(s);
        const auto chosen = select_subset(decode_u64(*rbs), views[j].az_positions.size(), M);
        mask_a[j] = mask_from_positions(views[j].az_len, chosen, views[j].az_positions);
        mask_b[j] = mask_from_positions(views[j].bz_len, chosen, views[j].bz_positions);
        if (!mdi) {
            for (const std::uint32_t e : chosen)
                views[j].bb84_obs.zp_sizes[views[j].z_intensity[e]] += 1.0;
        }
        // forward the sift information to the units outside sigma_1
        mask_b[j] = forward_and_vote(c, LabId::Bob, mask_b[j], "sift-fwd" + js, "sift-mask");
        if (s.aborted()) return finish_aborted(s);
        // Sifted shares are pinned to M bits: zero padding stands in for the
        // default shares of a dealer that dealt short, and keeps every later
        // linear stage well-formed (EV then catches any key damage).
        const BitString mask = mask_b[j];
        vss_map_linear(s, LabId::Bob, "rB" + js, "sB" + js, [&mask, M](const BitString& v) {
            BitString out = v.select_mask(mask);
            out.resize(M);
            return out;
        });
        if (mdi) {
            // Z-basis convention: Bob flips every sifted bit, applied to the
            // first share by its holders.
            const VssConfig& cfg = s.unit_vss();
            for (int p : cfg.sigma[0]) {
                BitString* v = s.mutable_share(unit_id(LabId::Bob, p), "sB" + js, 0);
                BitString ones(v->size());
                for (std::size_t i = 0; i < ones.size(); ++i) ones.set(i, true);
                *v ^= ones;
            }
        }
    }

    // Step 3: parameter estimation by Bob's sigma_1 units.
    ProtocolResult result;
    std::vector<PairTerms> terms;
    for (int j = 0; j < deploy.n_q; ++j) {
        double h;
        if (mdi) {
            const PeResultMdi pe =
                mdi_pe(views[j].mdi_obs, inputs, static_cast<double>(rounds), opt.pe_budgets);
            h = h_eps_proxy(pe.n11z_l, pe.phi11z_u, pe.no_key);
        } else {
            const PeResultBb84 pe = bb84_pe(views[j].bb84_obs, inputs, opt.pe_budgets);
            h = h_eps_proxy(pe.n1z_l, pe.phi1z_u, pe.no_key);
        }
        result.h_eps.push_back(h);
        terms.push_back(PairTerms{h, ec_leakage(static_cast<double>(M), opt.f_ec, opt.e_tol)});
    }
    std::int64_t l;
    if (opt.fixed_length) {
        l = *opt.fixed_length;
    } else {
        l = deploy.module_model == CorruptionModel::PN
                ? key_length_pn(terms, opt.hat_eps_cor, opt.eps_pa, opt.delta, deploy.n_q)
                : key_length_ac(terms, opt.hat_eps_cor, opt.eps_pa, opt.delta);
    }
    l = std::min<std::int64_t>(l, static_cast<std::int64_t>(M) * deploy.n_q);
    if (l <= 0) {
        s.raise_abort(c.first_honest_sigma1(LabId::Bob), "pe/no-key");
        return finish_aborted(s);
    }
    result.length = l;
    forward_and_vote(c, LabId::Bob, encode_u64(static_cast<std::uint64_t>(l)), "pe-l", "length");
    if (s.aborted()) return finish_aborted(s);

    // Step 4: RBS generation of the EV and PA hash descriptions.
    const std::size_t ev_k =
        static_cast<std::size_t>(std::ceil(std::log2(2.0 / opt.hat_eps_cor)));
    const auto ev_desc = rbs_generate(s, LabId::Bob, 2 * ev_k, "rbs-ev");
    if (!ev_desc) return finish_aborted(s);
    const auto pa_seed = rbs_generate(s, LabId::Bob, M * deploy.n_q + static_cast<std::size_t>(l) - 1,
                                      "rbs-pa");
    if (!pa_seed) return finish_aborted(s);

    // Step 5: information reconciliation.
    build_concatenated(c, LabId::Bob, "sB", "sB");
    const auto ev_hash = [&](const BitString& v) { return lfsr_toeplitz(*ev_desc, ev_k, v); };

    BitString sy_b;  // concatenated syndromes (transparent EC: the key itself)
    if (opt.ec_mode == EcMode::Transparent) {
        vss_map_linear(s, LabId::Bob, "sB", "syB", [](const BitString& v) { return v; });
        const auto outs = vss_reconstruct(s, LabId::Bob, "syB", "ir-syB");
        if (s.aborted()) return finish_aborted(s);
        for (const auto& [p, v] : outs)
            if (!s.is_active_corrupted(unit_id(LabId::Bob, p))) {
                sy_b = v;
                break;
            }
    }
    vss_map_linear(s, LabId::Bob, "sB", "hEVB", ev_hash);
    const auto ev_b_outs = vss_reconstruct(s, LabId::Bob, "hEVB", "ir-evB");
    if (s.aborted()) return finish_aborted(s);
    BitString h_ev_b;
    for (const auto& [p, v] : ev_b_outs)
        if (!s.is_active_corrupted(unit_id(LabId::Bob, p))) {
            h_ev_b = v;
            break;
        }

    // Bundle to Alice: sift positions, syndromes, EV description/tag, PA seed.
    BitString bundle;
    for (int j = 0; j < deploy.n_q; ++j) put_field(bundle, mask_a[j]);
    put_field(bundle, sy_b);
    put_field(bundle, *ev_desc);
    put_field(bundle, h_ev_b);
    put_field(bundle, *pa_seed);
    const auto delivered = cross_lab(
        c, LabId::Bob, [&](PartyId) -> const BitString& { return bundle; }, "ir-bundle",
        "lab-bundle");
    if (!delivered) return finish_aborted(s);

    std::size_t pos = 0;
    std::vector<BitString> mask_a_rx(deploy.n_q);
    BitString sy_b_rx, ev_desc_rx, h_ev_b_rx, pa_seed_rx;
    try {
        for (int j = 0; j < deploy.n_q; ++j) mask_a_rx[j] = get_field(*delivered, pos);
        sy_b_rx = get_field(*delivered, pos);
        ev_desc_rx = get_field(*delivered, pos);
        h_ev_b_rx = get_field(*delivered, pos);
        pa_seed_rx = get_field(*delivered, pos);
        if (ev_desc_rx.size() != 2 * ev_k ||
            pa_seed_rx.size() != M * deploy.n_q + static_cast<std::size_t>(l) - 1)
            throw std::out_of_range("bundle shape");
    } catch (const std::out_of_range&) {
        s.raise_abort(c.first_honest_sigma1(LabId::Alice), "ir/malformed");
        return finish_aborted(s);
    }

    // Alice's units outside sigma_1 receive the sift/EV/PA items in-lab.
    BitString fwd;
    for (int j = 0; j < deploy.n_q; ++j) put_field(fwd, mask_a_rx[j]);
    put_field(fwd, ev_desc_rx);
    put_field(fwd, pa_seed_rx);
    forward_and_vote(c, LabId::Alice, fwd, "ir-fwd", "sift-mask");
    if (s.aborted()) return finish_aborted(s);

    for (int j = 0; j < deploy.n_q; ++j) {
        const std::string js = std::to_string(j);
        const BitString mask = mask_a_rx[j];
        vss_map_linear(s, LabId::Alice, "rA" + js, "sA" + js, [&mask, M](const BitString& v) {
            BitString out = v.select_mask(mask);
            out.resize(M);
            return out;
        });
    }
    build_concatenated(c, LabId::Alice, "sA", "sA");

    if (opt.ec_mode == EcMode::Transparent) {
        vss_map_linear(s, LabId::Alice, "sA", "syA", [](const BitString& v) { return v; });
        const auto outs = vss_reconstruct(s, LabId::Alice, "syA", "ir-syA");
        if (s.aborted()) return finish_aborted(s);
        BitString sy_a;
        for (const auto& [p, v] : outs)
            if (!s.is_active_corrupted(unit_id(LabId::Alice, p))) {
                sy_a = v;
                break;
            }
        // Error pattern applied to the first share only.
        BitString e_hat = sy_a ^ sy_b_rx;
        const VssConfig& cfg = s.unit_vss();
        for (int p : cfg.sigma[0]) *s.mutable_share(unit_id(LabId::Alice, p), "sA", 0) ^= e_hat;
    }
    if (opt.ev_inject_flip) {
        const VssConfig& cfg = s.unit_vss();
        for (int p : cfg.sigma[0]) {
            BitString* v = s.mutable_share(unit_id(LabId::Alice, p), "sA", 0);
            if (v->size() > 0) v->set(0, !v->get(0));
        }
    }

    const auto ev_hash_rx = [&](const BitString& v) { return lfsr_toeplitz(ev_desc_rx, ev_k, v); };
    vss_map_linear(s, LabId::Alice, "sA", "hEVA", ev_hash_rx);
    const auto ev_a_outs = vss_reconstruct(s, LabId::Alice, "hEVA", "ir-evA");
    if (s.aborted()) return finish_aborted(s);
    for (const PartyId u : c.sigma1(LabId::Alice)) {
        if (s.is_active_corrupted(u)) continue;
        if (ev_a_outs.at(u.index) != h_ev_b_rx) {
            s.raise_abort(u, "ev/mismatch");
            return finish_aborted(s);
        }
    }

    // Step 6: privacy amplification, share-wise.
    const ToeplitzHash pa_a = ToeplitzHash::from_seed(pa_seed_rx, M * deploy.n_q,
                                                      static_cast<std::size_t>(l));
    const ToeplitzHash pa_b = ToeplitzHash::from_seed(*pa_seed, M * deploy.n_q,
                                                      static_cast<std::size_t>(l));
    vss_map_linear(s, LabId::Alice, "sA", "kA",
                   [&pa_a](const BitString& v) { return toeplitz_apply(pa_a, v); });
    vss_map_linear(s, LabId::Bob, "sB", "kB",
                   [&pa_b](const BitString& v) { return toeplitz_apply(pa_b, v); });

    result.key_a = finalize_key(s, LabId::Alice, "kA");
    result.key_b = finalize_key(s, LabId::Bob, "kB");
    result.keys_equal = result.key_a == result.key_b;
    result.auth_bits_consumed = s.pool_consumed();
    return result;
}

}  // namespace qkdpp

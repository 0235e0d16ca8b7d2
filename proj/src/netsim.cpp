#include "qkdpp/netsim.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qkdpp {

PartyId module_id(LabId lab, int index) { return PartyId{lab, Role::QkdModule, index}; }
PartyId unit_id(LabId lab, int index) { return PartyId{lab, Role::CpUnit, index}; }

std::string to_string(PartyId p) {
    std::string s = p.lab == LabId::Alice ? "A" : "B";
    s += p.role == Role::QkdModule ? "q" : "c";
    s += std::to_string(p.index);
    return s;
}

void DeploymentConfig::validate() const {
    if (n_q < 1 || n_c < 1) throw std::invalid_argument("deployment: need at least one device of each kind");
    if (module_model == CorruptionModel::PN) {
        if (n_q != 2) throw std::invalid_argument("deployment: PN modules use n_q = 2");
    } else if (n_q != t_q + 1) {
        throw std::invalid_argument("deployment: n_q must equal t_q + 1");
    }
    const ResourceRow row = resource_row(unit_model, t_c);
    if (n_c != row.n_c) throw std::invalid_argument("deployment: n_c does not match the unit model");
}

namespace {

VssConfig unit_config_for(CorruptionModel model, int t_c) {
    if (model == CorruptionModel::PN) {
        // The PN allocation is independent of t; build it directly so
        // deployments may declare any number of corrupted units.
        VssConfig cfg;
        cfg.model = model;
        cfg.t = t_c;
        cfg.n = 2;
        cfg.q = 2;
        cfg.sigma = {{0}, {1}};
        return cfg;
    }
    return make_vss_config(model, t_c);
}

}  // namespace

Session::Session(const DeploymentConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed), pool_seed_(rng_()) {
    cfg_.validate();
    unit_vss_ = unit_config_for(cfg.unit_model, cfg.t_c);
    if (unit_vss_.n != cfg.n_c) throw std::invalid_argument("deployment: n_c mismatch");
}

void Session::inject(const AdversaryScript& script) {
    int corrupted_pairs = 0;
    for (int j = 0; j < cfg_.n_q; ++j) {
        if (script.corrupted.count(module_id(LabId::Alice, j)) ||
            script.corrupted.count(module_id(LabId::Bob, j)))
            ++corrupted_pairs;
    }
    // PN permits every pair corrupted; the other models bound them by t_q.
    if (cfg_.module_model != CorruptionModel::PN && corrupted_pairs > cfg_.t_q)
        throw std::invalid_argument("adversary script exceeds t_q corrupted pairs");
    for (LabId lab : {LabId::Alice, LabId::Bob}) {
        int corrupted_units = 0;
        for (int u = 0; u < cfg_.n_c; ++u)
            if (script.corrupted.count(unit_id(lab, u))) ++corrupted_units;
        if (corrupted_units > cfg_.t_c && !(cfg_.unit_model == CorruptionModel::PN))
            throw std::invalid_argument("adversary script exceeds t_c corrupted units");
    }
    for (const auto& [party, b] : script.corrupted) {
        const CorruptionModel model =
            party.role == Role::QkdModule ? cfg_.module_model : cfg_.unit_model;
        if (!is_active(model) && b.is_active())
            throw std::invalid_argument("passive model: only leaking behaviors allowed");
    }
    script_ = script;
}

const Behavior* Session::behavior(PartyId p) const {
    const auto it = script_.corrupted.find(p);
    return it == script_.corrupted.end() ? nullptr : &it->second;
}

bool Session::is_active_corrupted(PartyId p) const {
    const Behavior* b = behavior(p);
    return b != nullptr && b->is_active();
}

int Session::sink_id(PartyId party) const {
    if (script_.collaborative) return 0;
    int id = 1;
    for (const auto& [p, b] : script_.corrupted) {
        if (p == party) return id;
        ++id;
    }
    return -1;
}

void Session::leak_to_sink(PartyId party, const BitString& payload) {
    const Behavior* b = behavior(party);
    if (b != nullptr && b->leak) sinks_[sink_id(party)].push_back(payload);
}

void Session::log(const std::string& phase, PartyId from, PartyId to, const BitString& payload) {
    if (transcript_enabled_) transcript_.push_back(TranscriptEntry{phase, from, to, payload});
}

void Session::raise_abort(PartyId origin, const std::string& phase) {
    if (abort_.aborted) return;
    abort_.aborted = true;
    abort_.origin = origin;
    abort_.phase = phase;
    abort_.mv_tie_flag = mv_tie_seen_;
    // Two-step abortion: the order goes to everyone, each receiver resends.
    // In-lab channels are secure, so orders reach all non-actively-corrupted
    // parties; the transcript records only the first wave for brevity.
    for (LabId lab : {LabId::Alice, LabId::Bob})
        for (int u = 0; u < cfg_.n_c; ++u)
            if (unit_id(lab, u) != origin) log(phase + "/abort", origin, unit_id(lab, u), BitString());
}

BitString Session::send_secure(const std::string& phase, PartyId from, PartyId to,
                               const std::string& msg_class, const BitString& payload) {
    // Secure channels exist inside a lab only: module to local unit, or unit
    // to unit. Cross-lab traffic must use the authenticated channels.
    if (from.lab != to.lab || (from.role == Role::QkdModule && to.role == Role::QkdModule))
        throw std::invalid_argument("no secure channel between these parties");
    BitString delivered = payload;
    const Behavior* b = behavior(from);
    if (b != nullptr && b->tamper && (b->tamper_class.empty() || b->tamper_class == msg_class) &&
        delivered.size() > 0) {
        delivered.set(0, !delivered.get(0));
    }
    log(phase, from, to, delivered);
    leak_to_sink(from, delivered);
    leak_to_sink(to, delivered);
    return delivered;
}

std::optional<BitString> Session::send_authenticated(const std::string& phase, PartyId from,
                                                     PartyId to, const std::string& msg_class,
                                                     const BitString& payload) {
    if (from.role != Role::CpUnit || to.role != Role::CpUnit || from.lab == to.lab)
        throw std::invalid_argument("authenticated channels only link units across labs");
    BitString sent = payload;
    const Behavior* b = behavior(from);
    if (b != nullptr && b->tamper && (b->tamper_class.empty() || b->tamper_class == msg_class) &&
        sent.size() > 0) {
        sent.set(0, !sent.get(0));  // a lying sender still produces a valid tag
    }
    KeyPool& sender_pool = pool_copy(from, to);
    AuthResult tagged;
    try {
        tagged = auth_tag(sender_pool, sent, cfg_.gamma_au);
    } catch (const pool_exhausted&) {
        raise_abort(from, phase + "/pool-exhausted");
        return std::nullopt;
    }
    BitString delivered = sent;
    if (script_.wire_tamper_classes.count(msg_class) && delivered.size() > 0)
        delivered.set(0, !delivered.get(0));
    log(phase, from, to, delivered);
    leak_to_sink(from, delivered);
    leak_to_sink(to, delivered);
    KeyPool& receiver_pool = pool_copy(to, from);
    if (!auth_verify(receiver_pool, delivered, tagged.tag)) {
        if (!is_active_corrupted(to)) raise_abort(to, phase + "/auth-reject");
        return std::nullopt;
    }
    return delivered;
}

BitString Session::majority_vote(const std::vector<BitString>& copies, std::size_t default_len) {
    std::vector<std::pair<BitString, int>> counts;
    for (const auto& c : copies) {
        bool found = false;
        for (auto& [v, n] : counts)
            if (v == c) {
                ++n;
                found = true;
                break;
            }
        if (!found) counts.emplace_back(c, 1);
    }
    int best = 0, best_count = 0;
    bool tie = false;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i].second > best_count) {
            best = static_cast<int>(i);
            best_count = counts[i].second;
            tie = false;
        } else if (counts[i].second == best_count) {
            tie = true;
        }
    }
    if (counts.empty() || tie) {
        mv_tie_seen_ = true;
        return BitString(default_len);
    }
    return counts[best].first;
}

void Session::store_share(PartyId p, const std::string& label, int share, BitString value) {
    stores_[p][label][share] = std::move(value);
}

const BitString* Session::find_share(PartyId p, const std::string& label, int share) const {
    const auto pit = stores_.find(p);
    if (pit == stores_.end()) return nullptr;
    const auto lit = pit->second.find(label);
    if (lit == pit->second.end()) return nullptr;
    const auto sit = lit->second.find(share);
    return sit == lit->second.end() ? nullptr : &sit->second;
}

BitString* Session::mutable_share(PartyId p, const std::string& label, int share) {
    return const_cast<BitString*>(std::as_const(*this).find_share(p, label, share));
}

std::map<int, BitString>& Session::shares_of(PartyId p, const std::string& label) {
    return stores_[p][label];
}

std::string Session::transcript_text() const {
    std::ostringstream os;
    for (const auto& e : transcript_)
        os << e.phase << ' ' << to_string(e.from) << ' ' << to_string(e.to) << ' '
           << e.payload.to_hex() << '\n';
    return os.str();
}

KeyPool& Session::pool_copy(PartyId holder, PartyId peer) {
    if (holder.role != Role::CpUnit || peer.role != Role::CpUnit || holder.lab == peer.lab)
        throw std::invalid_argument("key pools only exist between units across labs");
    auto key = holder.lab == LabId::Alice ? std::make_pair(holder, peer) : std::make_pair(peer, holder);
    auto it = pools_.find(key);
    if (it == pools_.end()) {
        // Pre-provisioned pool; materialized on first use with a seed fixed
        // at session construction so usage order cannot change its content.
        std::mt19937_64 pool_rng(pool_seed_ ^ (static_cast<std::uint64_t>(key.first.index) << 32) ^
                                 static_cast<std::uint64_t>(key.second.index));
        const KeyPool pool = KeyPool::random(cfg_.key_pool_bits, pool_rng);
        it = pools_.emplace(key, std::array<KeyPool, 2>{pool, pool}).first;
    }
    return it->second[holder.lab == LabId::Alice ? 0 : 1];
}

std::size_t Session::pool_consumed() const {
    std::size_t total = 0;
    for (const auto& [k, copies] : pools_) total += copies[0].consumed();
    return total;
}

std::vector<PartyId> Session::units_of(LabId lab) const {
    std::vector<PartyId> out;
    for (int u = 0; u < cfg_.n_c; ++u) out.push_back(unit_id(lab, u));
    return out;
}

bool vss_share(Session& s, PartyId dealer, LabId lab, const std::string& label, const BitString& m) {
    if (s.aborted()) return false;
    const VssConfig& cfg = s.unit_vss();
    auto shares = split_shares(m, cfg.q, s.rng());

    const Behavior* db = s.behavior(dealer);
    const bool inconsistent = db != nullptr && db->inconsistent_deal;
    const bool silent = db != nullptr && db->silent_deal;

    // Step 2: redundant delivery along sigma; withheld deliveries default to
    // a zero string of the dealt length.
    for (int i = 0; i < cfg.q; ++i) {
        for (int p : cfg.sigma[i]) {
            const PartyId receiver = unit_id(lab, p);
            if (silent && (s.rng()() & 1u)) {
                s.store_share(receiver, label, i, BitString(m.size()));
                continue;
            }
            BitString copy = shares[i];
            if (inconsistent && s.is_active_corrupted(receiver) && copy.size() > 0)
                copy.set(0, !copy.get(0));
            const BitString got = s.send_secure("share", dealer, receiver, "vss-deal", copy);
            s.store_share(receiver, label, i, got);
        }
    }

    // Step 3: pairwise consistency tests inside each sigma_i.
    for (int i = 0; i < cfg.q && !s.aborted(); ++i) {
        const auto& members = cfg.sigma[i];
        if (members.size() < 2) continue;
        for (std::size_t x = 0; x < members.size() && !s.aborted(); ++x) {
            for (std::size_t y = x + 1; y < members.size() && !s.aborted(); ++y) {
                const PartyId px = unit_id(lab, members[x]);
                const PartyId py = unit_id(lab, members[y]);
                for (auto [sender, receiver] : {std::pair{px, py}, std::pair{py, px}}) {
                    BitString own = *s.find_share(sender, label, i);
                    const Behavior* sb = s.behavior(sender);
                    if (sb != nullptr && sb->is_active() && sb->echo_in_consistency) {
                        // hide a bad deal copy by declaring the honest one
                        own = shares[i];
                    }
                    const BitString got =
                        s.send_secure("consistency", sender, receiver, "vss-consistency", own);
                    if (!s.is_active_corrupted(receiver) &&
                        got != *s.find_share(receiver, label, i)) {
                        s.raise_abort(receiver, "share-consistency");
                        break;
                    }
                }
            }
        }
    }

    // Groundless abort orders from actively corrupted parties.
    if (!s.aborted()) {
        for (const PartyId u : s.units_of(lab)) {
            const Behavior* b = s.behavior(u);
            if (b != nullptr && b->false_abort) {
                s.raise_abort(u, "share-false-abort");
                break;
            }
        }
    }
    return !s.aborted();
}

std::map<int, BitString> vss_reconstruct(Session& s, LabId lab, const std::string& label,
                                         const std::string& phase) {
    const VssConfig& cfg = s.unit_vss();
    std::map<int, BitString> outputs;
    if (s.aborted()) return outputs;

    // Every holder declares each of its copies to every other party; the
    // fixed ascending order keeps majority voting deterministic.
    std::map<int, std::map<int, BitString>> declared;  // share -> declaring party -> value
    for (int i = 0; i < cfg.q; ++i) {
        for (int p : cfg.sigma[i]) {
            const PartyId holder = unit_id(lab, p);
            BitString value = *s.find_share(holder, label, i);
            const Behavior* b = s.behavior(holder);
            if (b != nullptr && b->lie_in_reconstruct && value.size() > 0)
                value.set(0, !value.get(0));
            declared[i][p] = value;
        }
    }
    std::size_t dealt_len = 0;
    for (const auto& [i, copies] : declared)
        for (const auto& [p, v] : copies) dealt_len = std::max(dealt_len, v.size());

    for (int receiver = 0; receiver < cfg.n; ++receiver) {
        const PartyId rec = unit_id(lab, receiver);
        BitString value;
        for (int i = 0; i < cfg.q; ++i) {
            std::vector<BitString> copies;
            for (int p : cfg.sigma[i]) {
                const BitString& v = declared[i][p];
                if (p == receiver) {
                    copies.push_back(*s.find_share(rec, label, i));  // own copy, no channel
                } else {
                    copies.push_back(s.send_secure(phase, unit_id(lab, p), rec, "vss-reconstruct", v));
                }
            }
            value ^= s.majority_vote(copies, dealt_len);
        }
        outputs[receiver] = std::move(value);
    }
    return outputs;
}

void vss_map_linear(Session& s, LabId lab, const std::string& label, const std::string& out_label,
                    const std::function<BitString(const BitString&)>& f) {
    const VssConfig& cfg = s.unit_vss();
    for (int i = 0; i < cfg.q; ++i)
        for (int p : cfg.sigma[i]) {
            const PartyId holder = unit_id(lab, p);
            const BitString* v = s.find_share(holder, label, i);
            if (v != nullptr) s.store_share(holder, out_label, i, f(*v));
        }
}

std::optional<BitString> rbs_generate(Session& s, LabId lab, std::size_t length,
                                      const std::string& phase) {
    if (s.aborted()) return std::nullopt;
    const VssConfig& cfg = s.unit_vss();

    if (!is_active(cfg.model)) {
        // Passive units follow the protocol, so one designated unit
        // generates the string directly.
        const PartyId gen = unit_id(lab, 0);
        const BitString r = BitString::random(length, s.rng());
        for (int u = 1; u < cfg.n; ++u) s.send_secure(phase, gen, unit_id(lab, u), "rbs-direct", r);
        return r;
    }

    const int dealers = cfg.t + 1;
    std::vector<std::string> labels;
    for (int k = 0; k < dealers; ++k) {
        const PartyId dealer = unit_id(lab, k);
        const Behavior* b = s.behavior(dealer);
        const std::size_t deal_len = (b != nullptr && b->short_rbs_deal) ? length - 1 : length;
        BitString r_k = (b != nullptr && b->fixed_rbs_deal) ? BitString(deal_len)
                                                            : BitString::random(deal_len, s.rng());
        const std::string label = phase + "/r" + std::to_string(k);
        labels.push_back(label);
        if (!vss_share(s, dealer, lab, label, r_k)) return std::nullopt;
        // Length rule: any delivered share of the wrong length aborts.
        for (int i = 0; i < cfg.q && !s.aborted(); ++i)
            for (int p : cfg.sigma[i]) {
                const PartyId holder = unit_id(lab, p);
                if (s.is_active_corrupted(holder)) continue;
                const BitString* v = s.find_share(holder, label, i);
                if (v != nullptr && v->size() != length) {
                    s.raise_abort(holder, phase + "/length");
                    break;
                }
            }
        if (s.aborted()) return std::nullopt;
    }

    BitString result;
    for (const auto& label : labels) {
        auto outputs = vss_reconstruct(s, lab, label, phase + "/reconstruct");
        if (s.aborted()) return std::nullopt;
        // All non-actively-corrupted parties must reach one value.
        const BitString* common = nullptr;
        for (const auto& [p, v] : outputs) {
            if (s.is_active_corrupted(unit_id(lab, p))) continue;
            if (common == nullptr) common = &v;
            else if (!(*common == v)) throw std::logic_error("rbs: honest outputs diverged");
        }
        if (common != nullptr) result ^= *common;
    }
    return result;
}

}  // namespace qkdpp

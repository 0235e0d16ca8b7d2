#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qkdpp/auth.hpp"
#include "qkdpp/bitstring.hpp"
#include "qkdpp/types.hpp"
#include "qkdpp/vss.hpp"

namespace qkdpp {

enum class LabId : std::uint8_t { Alice, Bob };
enum class Role : std::uint8_t { QkdModule, CpUnit };

struct PartyId {
    LabId lab = LabId::Alice;
    Role role = Role::CpUnit;
    int index = 0;
    auto operator<=>(const PartyId&) const = default;
};

PartyId module_id(LabId lab, int index);
PartyId unit_id(LabId lab, int index);
std::string to_string(PartyId p);

// Behaviors a corrupted party may exhibit. Passive models admit only `leak`.
struct Behavior {
    bool leak = false;
    bool tamper = false;              // active sender mutates matching payloads
    std::string tamper_class;         // empty matches every class
    bool false_abort = false;         // raises a groundless abort during Share
    bool lie_in_reconstruct = false;  // declares flipped share copies
    bool inconsistent_deal = false;   // dealer: distinct copies to corrupted members
    bool silent_deal = false;         // dealer: withholds some deliveries
    bool short_rbs_deal = false;      // RBS dealer: (L-1)-bit input
    bool fixed_rbs_deal = false;      // RBS dealer: adversarial constant input
    bool echo_in_consistency = true;  // corrupted member hides a bad deal copy

    bool is_active() const {
        return tamper || false_abort || lie_in_reconstruct || inconsistent_deal || silent_deal ||
               short_rbs_deal || fixed_rbs_deal;
    }
};

struct AdversaryScript {
    std::map<PartyId, Behavior> corrupted;
    bool collaborative = true;
    std::set<std::string> wire_tamper_classes;  // in-flight lab-to-lab corruption
};

struct TranscriptEntry {
    std::string phase;
    PartyId from, to;
    BitString payload;
};

struct AbortState {
    bool aborted = false;
    PartyId origin;
    std::string phase;
    bool mv_tie_flag = false;
};

struct DeploymentConfig {
    int n_q = 1;
    int t_q = 0;
    int n_c = 1;
    int t_c = 0;
    CorruptionModel module_model = CorruptionModel::AC;
    CorruptionModel unit_model = CorruptionModel::AC;
    std::size_t key_pool_bits = 1u << 16;
    double gamma_au = 1e-9;

    void validate() const;
};

// In-process network of QKD modules and CP units with secure in-lab channels
// and authenticated lab-to-lab channels. Single-threaded and deterministic
// given the seed; one instance per session.
class Session {
public:
    Session(const DeploymentConfig& cfg, std::uint64_t seed);

    void inject(const AdversaryScript& script);

    const DeploymentConfig& config() const { return cfg_; }
    const VssConfig& unit_vss() const { return unit_vss_; }
    std::mt19937_64& rng() { return rng_; }

    bool aborted() const { return abort_.aborted; }
    const AbortState& abort_state() const { return abort_; }
    void raise_abort(PartyId origin, const std::string& phase);

    const Behavior* behavior(PartyId p) const;
    bool is_corrupted(PartyId p) const { return behavior(p) != nullptr; }
    bool is_active_corrupted(PartyId p) const;

    // Secure in-lab delivery. Returns the payload as received (active
    // corrupted senders may have mutated it).
    BitString send_secure(const std::string& phase, PartyId from, PartyId to,
                          const std::string& msg_class, const BitString& payload);

    // Authenticated lab-to-lab delivery between CP units; nullopt means the
    // tag check failed and the honest receiver aborted.
    std::optional<BitString> send_authenticated(const std::string& phase, PartyId from, PartyId to,
                                                const std::string& msg_class,
                                                const BitString& payload);

    // Majority vote with deterministic tie default (all-zero string).
    BitString majority_vote(const std::vector<BitString>& copies, std::size_t default_len);

    // Per-party share stores, keyed by a protocol-chosen label.
    void store_share(PartyId p, const std::string& label, int share, BitString value);
    const BitString* find_share(PartyId p, const std::string& label, int share) const;
    BitString* mutable_share(PartyId p, const std::string& label, int share);
    std::map<int, BitString>& shares_of(PartyId p, const std::string& label);

    const std::vector<TranscriptEntry>& transcript() const { return transcript_; }
    std::string transcript_text() const;
    // Bulk Monte-Carlo drivers disable recording to keep memory flat.
    void set_transcript_enabled(bool on) { transcript_enabled_ = on; }

    // Leak sinks: one global sink when collaborative, else one per adversary.
    const std::map<int, std::vector<BitString>>& leak_sinks() const { return sinks_; }

    // The copy of the pre-shared pool that `holder` keeps for its link with
    // `peer`; both copies start identical and advance in lockstep.
    KeyPool& pool_copy(PartyId holder, PartyId peer);
    std::size_t pool_consumed() const;  // net bits, counted once per pair

    std::vector<PartyId> units_of(LabId lab) const;
    const std::vector<int>& sigma1_units() const { return unit_vss_.sigma[0]; }

private:
    void log(const std::string& phase, PartyId from, PartyId to, const BitString& payload);
    void leak_to_sink(PartyId party, const BitString& payload);
    int sink_id(PartyId party) const;

    DeploymentConfig cfg_;
    VssConfig unit_vss_;
    AdversaryScript script_;
    std::mt19937_64 rng_;
    std::uint64_t pool_seed_ = 0;
    AbortState abort_;
    std::vector<TranscriptEntry> transcript_;
    bool transcript_enabled_ = true;
    std::map<int, std::vector<BitString>> sinks_;
    std::map<std::pair<PartyId, PartyId>, std::array<KeyPool, 2>> pools_;
    std::map<PartyId, std::map<std::string, std::map<int, BitString>>> stores_;
    bool mv_tie_seen_ = false;
};

// Share protocol of the conditional VSS scheme: q-out-of-q split, redundant
// delivery along sigma, pairwise consistency tests, two-step abortion.
// Returns false when the session aborted.
bool vss_share(Session& s, PartyId dealer, LabId lab, const std::string& label, const BitString& m);

// Reconstruct: every unit declares its copies, each party majority-votes per
// share and XORs. Returns each party's output (index -> value).
std::map<int, BitString> vss_reconstruct(Session& s, LabId lab, const std::string& label,
                                         const std::string& phase = "reconstruct");

// Share-wise linear map: every party applies f to each of its shares of
// `label` and stores the image under `out_label`. No communication.
void vss_map_linear(Session& s, LabId lab, const std::string& label, const std::string& out_label,
                    const std::function<BitString(const BitString&)>& f);

// Distributed generation of a common uniform L-bit string among a lab's
// units: t+1 VSS dealers for active unit models, direct generation by unit 0
// for passive ones. Returns nullopt on abort.
std::optional<BitString> rbs_generate(Session& s, LabId lab, std::size_t length,
                                      const std::string& phase = "rbs");

}  // namespace qkdpp

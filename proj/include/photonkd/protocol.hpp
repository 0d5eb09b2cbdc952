// Monte Carlo BB84 over the 4-dimensional space: random encoding over a
// chosen set of mutually unbiased bases, a lossy/depolarizing channel, an
// optional intercept-resend eavesdropper, MZEM detection, sifting and
// QBER/key-rate statistics, plus the closed-form attack rates used as the
// simulation cross-check.

#pragma once

#include "photonkd/core.hpp"
#include "photonkd/mub.hpp"
#include "photonkd/mzem.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace photonkd {

struct ChannelConfig {
    double transmission = 1.0; // photon survival probability, (0,1]
    double depolarizing = 0.0; // probability of replacement by a random
                               // canonical state, [0,1]
};

struct EveConfig {
    bool enabled = false;
    // Bases Eve measures in; empty means "same set as Alice and Bob".
    std::vector<BasisId> bases;
};

struct ProtocolConfig {
    std::vector<BasisId> basis_set; // 2..5 distinct bases
    std::uint64_t n_rounds = 0;
    EveConfig eve;
    ChannelConfig channel;
    MzemSettings mzem;
    std::uint64_t seed = 0;
    double qber_abort_threshold = 1.0; // flag-only; no security bound computed
    int workers = 1;

    void validate() const; // throws std::invalid_argument
};

struct RoundRecord {
    BasisId alice_basis = BasisId::kB1;
    int alice_state_idx = 0; // 2-bit symbol
    std::optional<BasisId> eve_basis;
    std::optional<int> eve_outcome;
    bool photon_lost = false;
    BasisId bob_basis = BasisId::kB1;
    std::optional<int> bob_detector; // 0..3, absent when the photon is lost
    std::optional<int> bob_symbol;   // decoded 2-bit symbol
    bool sifted = false;
};

struct ProtocolStats {
    std::uint64_t n_rounds = 0;
    std::uint64_t n_sifted = 0;
    double symbol_error_rate = 0.0;
    double bit_error_rate = 0.0;
    double sifted_fraction = 0.0;
    double raw_key_bits_per_photon = 0.0; // 2 * sifted_fraction
    bool qber_threshold_exceeded = false;
};

struct ProtocolResult {
    ProtocolStats stats;
    std::vector<RoundRecord> records;
    BitString alice_bits; // 2 bits per sifted round, symbol MSB first
    BitString bob_bits;
};

// Runs the full protocol; reproducible from config.seed for any worker
// count (rounds are dispatched in fixed-size blocks with per-block streams
// derived from the root seed, merged in block order).
ProtocolResult run_protocol(const ProtocolConfig &config, const BasisTable &table);
ProtocolResult run_protocol(const ProtocolConfig &config);

// Closed-form intercept-resend rates for m mutually unbiased bases:
// symbol rate (1 - 1/m) * 3/4, bit rate (1 - 1/m) * 1/2. The closed form
// relies on the cross-basis overlaps all being 1/4, hence the flag.
std::pair<double, double> analytic_attack_rates(int basis_count,
                                                bool unbiased = true);

// Indices of the sifted rounds, in order.
std::vector<std::size_t> sift(const std::vector<RoundRecord> &records);

// (symbol error rate, bit error rate) over aligned 2-bit symbols.
std::pair<double, double> qber(const BitString &alice_bits,
                               const BitString &bob_bits);

} // namespace photonkd

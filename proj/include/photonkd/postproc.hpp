// Classical post-processing for sifted key material: blocked-parity
// information reconciliation with binary search, and Toeplitz-hash privacy
// amplification. Key files are plain text, one key per line as
// "<bit count> <hex digits>".

#pragma once

#include "photonkd/core.hpp"

#include <cstdint>
#include <string>

namespace photonkd {

struct ReconcileReport {
    BitString corrected;            // Bob's string after correction
    std::size_t parity_bits_leaked = 0; // every exchanged parity counts 1 bit
    double residual_error_estimate = 0.0;
    int passes = 0;
};

// Iterative blocked parity comparison with binary search inside mismatched
// blocks and a fresh random permutation before every pass after the first.
// Alice's string is the reference and is never modified. Each pass leaks one
// parity per block plus ceil(log2(block)) parities per detected mismatch.
ReconcileReport reconcile(const BitString &alice, const BitString &bob,
                          std::size_t block_size, int passes, RandomStream &rng);

// Hashes the key through a seed-determined Toeplitz matrix over GF(2) down
// to length - leaked - security_margin bits. Throws std::invalid_argument
// when nothing would remain.
BitString privacy_amplify(const BitString &key, std::size_t leaked,
                          std::uint64_t seed, std::size_t security_margin);

void write_key_file(const std::string &path, const BitString &bits);
BitString read_key_file(const std::string &path);

} // namespace photonkd

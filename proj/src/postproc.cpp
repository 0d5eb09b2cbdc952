#include "photonkd/postproc.hpp"

#include <bit>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace photonkd {

namespace {

int parity_of_range(const BitString &bits, const std::vector<std::size_t> &perm,
                    std::size_t begin, std::size_t end) {
    int p = 0;
    for (std::size_t i = begin; i < end; ++i)
        p ^= bits[perm[i]];
    return p;
}

// Locates and flips the single corrigible error inside [begin, end), leaking
// one parity per bisection level.
void bisect_fix(const BitString &alice, BitString &bob,
                const std::vector<std::size_t> &perm, std::size_t begin,
                std::size_t end, std::size_t &leaked) {
    while (end - begin > 1) {
        const std::size_t mid = begin + (end - begin) / 2;
        ++leaked;
        if (parity_of_range(alice, perm, begin, mid) !=
            parity_of_range(bob, perm, begin, mid))
            end = mid;
        else
            begin = mid;
    }
    bob[perm[begin]] ^= 1;
}

std::vector<std::uint64_t> pack_bits(const BitString &bits) {
    std::vector<std::uint64_t> words((bits.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i])
            words[i / 64] |= std::uint64_t{1} << (i % 64);
    return words;
}

} // namespace

ReconcileReport reconcile(const BitString &alice, const BitString &bob,
                          std::size_t block_size, int passes, RandomStream &rng) {
    if (alice.size() != bob.size())
        throw std::invalid_argument("key strings differ in length");
    if (alice.empty())
        throw std::invalid_argument("key strings must be nonempty");
    if (block_size < 2)
        throw std::invalid_argument("block size must be at least 2");
    if (passes < 1)
        throw std::invalid_argument("at least one pass is required");

    const std::size_t n = alice.size();
    ReconcileReport report;
    report.corrected = bob;
    report.passes = passes;

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    std::size_t final_pass_mismatches = 0;
    for (int pass = 0; pass < passes; ++pass) {
        if (pass > 0) {
            for (std::size_t i = n - 1; i > 0; --i) {
                const std::size_t j =
                    rng.uniform_below(static_cast<std::uint32_t>(i + 1));
                std::swap(perm[i], perm[j]);
            }
        }
        std::size_t mismatches = 0;
        for (std::size_t begin = 0; begin < n; begin += block_size) {
            const std::size_t end = std::min(begin + block_size, n);
            ++report.parity_bits_leaked;
            if (parity_of_range(alice, perm, begin, end) !=
                parity_of_range(report.corrected, perm, begin, end)) {
                ++mismatches;
                bisect_fix(alice, report.corrected, perm, begin, end,
                           report.parity_bits_leaked);
            }
        }
        final_pass_mismatches = mismatches;
    }
    // Each block found mismatching in the last pass held at least one error;
    // blocks with an even error count stay invisible, so this is an estimate.
    report.residual_error_estimate =
        static_cast<double>(final_pass_mismatches) / static_cast<double>(n);
    return report;
}

BitString privacy_amplify(const BitString &key, std::size_t leaked,
                          std::uint64_t seed, std::size_t security_margin) {
    const std::size_t len = key.size();
    if (len == 0)
        throw std::invalid_argument("key must be nonempty");
    if (leaked + security_margin >= len)
        throw std::invalid_argument("leakage and margin consume the whole key");
    const std::size_t out_len = len - leaked - security_margin;

    // Toeplitz row j is diagonal[j .. j+len-1] against the reversed key, so
    // every output bit is one windowed popcount.
    const std::size_t diag_bits = len + out_len - 1;
    RandomStream rs(seed);
    BitString diag(diag_bits);
    for (std::size_t i = 0; i < diag_bits; ++i)
        diag[i] = static_cast<std::uint8_t>(rs.next_u64() & 1);

    BitString key_rev(len);
    for (std::size_t i = 0; i < len; ++i)
        key_rev[i] = key[len - 1 - i];

    const std::vector<std::uint64_t> diag_words = pack_bits(diag);
    const std::vector<std::uint64_t> key_words = pack_bits(key_rev);

    BitString out(out_len);
    for (std::size_t j = 0; j < out_len; ++j) {
        const std::size_t word = j / 64;
        const unsigned shift = j % 64;
        int parity = 0;
        for (std::size_t w = 0; w < key_words.size(); ++w) {
            std::uint64_t window = diag_words[word + w] >> shift;
            if (shift != 0 && word + w + 1 < diag_words.size())
                window |= diag_words[word + w + 1] << (64 - shift);
            parity ^= std::popcount(window & key_words[w]) & 1;
        }
        out[j] = static_cast<std::uint8_t>(parity);
    }
    return out;
}

void write_key_file(const std::string &path, const BitString &bits) {
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open key file for writing: " + path);
    f << bits.size() << ' ';
    int nibble = 0;
    int filled = 0;
    std::string hex;
    hex.reserve((bits.size() + 3) / 4);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        nibble = (nibble << 1) | bits[i];
        if (++filled == 4) {
            hex.push_back("0123456789abcdef"[nibble]);
            nibble = 0;
            filled = 0;
        }
    }
    if (filled > 0)
        hex.push_back("0123456789abcdef"[nibble << (4 - filled)]);
    f << hex << '\n';
}

BitString read_key_file(const std::string &path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open key file: " + path);
    std::size_t n_bits = 0;
    std::string hex;
    if (!(f >> n_bits >> hex))
        throw std::runtime_error("malformed key file: " + path);
    if (hex.size() < (n_bits + 3) / 4)
        throw std::runtime_error("key file shorter than declared: " + path);
    BitString bits;
    bits.reserve(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
        const char c = hex[i / 4];
        int value;
        if (c >= '0' && c <= '9')
            value = c - '0';
        else if (c >= 'a' && c <= 'f')
            value = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
            value = c - 'A' + 10;
        else
            throw std::runtime_error("invalid hex digit in key file: " + path);
        bits.push_back(static_cast<std::uint8_t>((value >> (3 - i % 4)) & 1));
    }
    return bits;
}

} // namespace photonkd

#include "photonkd/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace photonkd {

namespace {

// Rounds per RNG block; fixed so results are independent of worker count.
constexpr std::uint64_t kBlockRounds = 8192;

struct BasisContext {
    std::array<PureState4, 4> prepared; // circuit outputs for the 4 symbols
    Operator4 measure_op = Operator4::identity();
    std::array<int, 4> decode{}; // detected canonical index -> symbol
};

struct RunContext {
    const ProtocolConfig *config = nullptr;
    const BasisTable *table = nullptr;
    std::vector<BasisId> eve_bases;
    std::array<BasisContext, 5> bases; // indexed by basis_index()
};

struct BlockOutput {
    std::vector<RoundRecord> records;
    BitString alice_bits;
    BitString bob_bits;
};

BasisContext make_basis_context(const BasisTable &table, BasisId b) {
    BasisContext ctx;
    ctx.measure_op = compile(measurement_circuit(b));
    ctx.decode = table.decode[basis_index(b)];
    for (int i = 0; i < 4; ++i) {
        const PrepCircuit circuit = prep_circuit(b, i);
        ctx.prepared[i] = apply(compile(circuit.full()), circuit.input);
    }
    return ctx;
}

void append_symbol(BitString &bits, int symbol) {
    bits.push_back(static_cast<std::uint8_t>((symbol >> 1) & 1));
    bits.push_back(static_cast<std::uint8_t>(symbol & 1));
}

BlockOutput run_block(const RunContext &ctx, std::uint64_t block_index,
                      std::uint64_t rounds_in_block, RandomStream rng) {
    (void)block_index;
    const ProtocolConfig &cfg = *ctx.config;
    const auto &set = cfg.basis_set;
    const auto m = static_cast<std::uint32_t>(set.size());
    const auto me = static_cast<std::uint32_t>(ctx.eve_bases.size());

    BlockOutput out;
    out.records.reserve(rounds_in_block);
    for (std::uint64_t r = 0; r < rounds_in_block; ++r) {
        RoundRecord rec;
        rec.alice_basis = set[rng.uniform_below(m)];
        rec.alice_state_idx = static_cast<int>(rng.uniform_below(4));
        rec.photon_lost = rng.uniform() >= cfg.channel.transmission;
        rec.bob_basis = set[rng.uniform_below(m)];

        if (!rec.photon_lost) {
            const BasisContext &actx = ctx.bases[basis_index(rec.alice_basis)];
            PureState4 psi = actx.prepared[rec.alice_state_idx];
            if (cfg.channel.depolarizing > 0.0 &&
                rng.bernoulli(cfg.channel.depolarizing))
                psi = PureState4::computational(rng.uniform_below(4));
            if (cfg.eve.enabled) {
                const BasisId eb = ctx.eve_bases[rng.uniform_below(me)];
                const int outcome =
                    born_sample(psi, ctx.table->basis_states(eb), rng);
                rec.eve_basis = eb;
                rec.eve_outcome = outcome;
                psi = ctx.table->state(eb, outcome);
            }
            const BasisContext &bctx = ctx.bases[basis_index(rec.bob_basis)];
            const PureState4 rotated = apply(bctx.measure_op, psi);
            const DetectionEvent ev = detect(rotated, cfg.mzem, rng);
            rec.bob_detector = ev.detector_index();
            rec.bob_symbol =
                bctx.decode[inferred_canonical_index(ev, cfg.mzem)];
        }
        rec.sifted = !rec.photon_lost && rec.alice_basis == rec.bob_basis;
        if (rec.sifted) {
            append_symbol(out.alice_bits, rec.alice_state_idx);
            append_symbol(out.bob_bits, *rec.bob_symbol);
        }
        out.records.push_back(rec);
    }
    return out;
}

} // namespace

void ProtocolConfig::validate() const {
    if (basis_set.size() < 2 || basis_set.size() > 5)
        throw std::invalid_argument("basis set must contain 2..5 bases");
    for (std::size_t i = 0; i < basis_set.size(); ++i)
        for (std::size_t j = i + 1; j < basis_set.size(); ++j)
            if (basis_set[i] == basis_set[j])
                throw std::invalid_argument("basis set entries must be distinct");
    if (n_rounds == 0)
        throw std::invalid_argument("round count must be positive");
    if (!(channel.transmission > 0.0 && channel.transmission <= 1.0))
        throw std::invalid_argument("transmission must lie in (0,1]");
    if (!(channel.depolarizing >= 0.0 && channel.depolarizing <= 1.0))
        throw std::invalid_argument("depolarizing probability must lie in [0,1]");
    if (eve.enabled && !eve.bases.empty()) {
        for (std::size_t i = 0; i < eve.bases.size(); ++i)
            for (std::size_t j = i + 1; j < eve.bases.size(); ++j)
                if (eve.bases[i] == eve.bases[j])
                    throw std::invalid_argument("eve basis set entries must be distinct");
    }
    if (!(qber_abort_threshold >= 0.0 && qber_abort_threshold <= 1.0))
        throw std::invalid_argument("qber threshold must lie in [0,1]");
    if (workers < 1)
        throw std::invalid_argument("worker count must be at least 1");
    mzem.validate();
}

ProtocolResult run_protocol(const ProtocolConfig &config, const BasisTable &table) {
    config.validate();

    RunContext ctx;
    ctx.config = &config;
    ctx.table = &table;
    ctx.eve_bases = config.eve.bases.empty() ? config.basis_set : config.eve.bases;
    for (BasisId b : kAllBases)
        ctx.bases[basis_index(b)] = make_basis_context(table, b);

    const std::uint64_t n_blocks =
        (config.n_rounds + kBlockRounds - 1) / kBlockRounds;
    std::vector<BlockOutput> blocks(n_blocks);
    const RandomStream root(config.seed);

    auto worker_loop = [&](std::atomic<std::uint64_t> &next) {
        while (true) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_blocks)
                break;
            const std::uint64_t start = b * kBlockRounds;
            const std::uint64_t count =
                std::min(kBlockRounds, config.n_rounds - start);
            blocks[b] = run_block(ctx, b, count, root.derive(b));
        }
    };

    std::atomic<std::uint64_t> next_block{0};
    const auto n_workers = static_cast<std::size_t>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(config.workers), n_blocks));
    if (n_workers <= 1) {
        worker_loop(next_block);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w)
            pool.emplace_back([&] { worker_loop(next_block); });
        for (std::thread &t : pool)
            t.join();
    }

    ProtocolResult result;
    result.records.reserve(config.n_rounds);
    for (BlockOutput &b : blocks) {
        result.records.insert(result.records.end(), b.records.begin(),
                              b.records.end());
        result.alice_bits.insert(result.alice_bits.end(), b.alice_bits.begin(),
                                 b.alice_bits.end());
        result.bob_bits.insert(result.bob_bits.end(), b.bob_bits.begin(),
                               b.bob_bits.end());
    }

    ProtocolStats &stats = result.stats;
    stats.n_rounds = config.n_rounds;
    stats.n_sifted = result.alice_bits.size() / 2;
    stats.sifted_fraction =
        static_cast<double>(stats.n_sifted) / static_cast<double>(config.n_rounds);
    stats.raw_key_bits_per_photon = 2.0 * stats.sifted_fraction;
    if (stats.n_sifted > 0) {
        const auto rates = qber(result.alice_bits, result.bob_bits);
        stats.symbol_error_rate = rates.first;
        stats.bit_error_rate = rates.second;
    }
    stats.qber_threshold_exceeded =
        stats.symbol_error_rate > config.qber_abort_threshold;
    return result;
}

ProtocolResult run_protocol(const ProtocolConfig &config) {
    return run_protocol(config, build_basis_table());
}

std::pair<double, double> analytic_attack_rates(int basis_count, bool unbiased) {
    if (basis_count < 1 || basis_count > 5)
        throw std::invalid_argument("basis count must lie in 1..5");
    if (!unbiased)
        throw std::invalid_argument(
            "closed-form rates hold only for mutually unbiased bases");
    const double mismatch = 1.0 - 1.0 / static_cast<double>(basis_count);
    return {mismatch * 0.75, mismatch * 0.5};
}

std::vector<std::size_t> sift(const std::vector<RoundRecord> &records) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].sifted)
            out.push_back(i);
    return out;
}

std::pair<double, double> qber(const BitString &alice_bits,
                               const BitString &bob_bits) {
    if (alice_bits.size() != bob_bits.size())
        throw std::invalid_argument("bit strings differ in length");
    if (alice_bits.empty() || alice_bits.size() % 2 != 0)
        throw std::invalid_argument("bit strings must hold whole 2-bit symbols");
    std::size_t symbol_errors = 0;
    std::size_t bit_errors = 0;
    for (std::size_t i = 0; i < alice_bits.size(); i += 2) {
        const int d0 = alice_bits[i] != bob_bits[i];
        const int d1 = alice_bits[i + 1] != bob_bits[i + 1];
        bit_errors += static_cast<std::size_t>(d0 + d1);
        symbol_errors += (d0 || d1) ? 1 : 0;
    }
    const double n_symbols = static_cast<double>(alice_bits.size() / 2);
    return {static_cast<double>(symbol_errors) / n_symbols,
            static_cast<double>(bit_errors) / static_cast<double>(alice_bits.size())};
}

} // namespace photonkd

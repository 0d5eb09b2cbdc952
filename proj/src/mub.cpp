#include "photonkd/mub.hpp"

#include <cmath>
#include <stdexcept>

namespace photonkd {

namespace {

constexpr double kTableTol = 1e-10;

PureState2 pol_state_for(int axis, int sign) {
    // axis: 0=Z, 1=X, 2=Y; sign: 0 -> +1 eigenstate, 1 -> -1 eigenstate
    switch (axis) {
    case 0:
        return sign == 0 ? PureState2::z0() : PureState2::z1();
    case 1:
        return sign == 0 ? PureState2::xplus() : PureState2::xminus();
    default:
        return sign == 0 ? PureState2::yplus() : PureState2::yminus();
    }
}

PureState4 superposition(const PureState4 &a, const PureState4 &b, Complex cb) {
    return PureState4::from_unnormalized(a.amp() + cb * b.amp());
}

Operator2 pauli(char p) {
    switch (p) {
    case 'I':
        return Operator2::identity();
    case 'X':
        return Operator2::pauli_x();
    case 'Y':
        return Operator2::pauli_y();
    default:
        return Operator2::pauli_z();
    }
}

std::array<Operator4, 3> csco_for(BasisId b) {
    // CSCO triples per basis, polarization factor first.
    static constexpr const char *kTriples[5][3] = {
        {"ZZ", "ZI", "IZ"}, {"XX", "XI", "IX"}, {"YY", "YI", "IY"},
        {"YX", "XZ", "ZY"}, {"XY", "YZ", "ZX"},
    };
    const auto &t = kTriples[basis_index(b)];
    return {tensor(pauli(t[0][0]), pauli(t[0][1])),
            tensor(pauli(t[1][0]), pauli(t[1][1])),
            tensor(pauli(t[2][0]), pauli(t[2][1]))};
}

std::array<PureState4, 4> product_basis(int axis) {
    std::array<PureState4, 4> out = {
        tensor_state(pol_state_for(axis, 0), pol_state_for(axis, 0)),
        tensor_state(pol_state_for(axis, 0), pol_state_for(axis, 1)),
        tensor_state(pol_state_for(axis, 1), pol_state_for(axis, 0)),
        tensor_state(pol_state_for(axis, 1), pol_state_for(axis, 1)),
    };
    return out;
}

std::array<PureState4, 4> entangled_basis(BasisId b) {
    const PureState2 h = PureState2::z0();
    const PureState2 v = PureState2::z1();
    const PureState2 r = PureState2::yplus();
    const PureState2 l = PureState2::yminus();
    if (b == BasisId::kB4) {
        // (|H,TEMR> ± |V,TEML>)/sqrt2 and (|H,TEML> ± |V,TEMR>)/sqrt2
        const PureState4 hr = tensor_state(h, r);
        const PureState4 hl = tensor_state(h, l);
        const PureState4 vr = tensor_state(v, r);
        const PureState4 vl = tensor_state(v, l);
        return {superposition(hr, vl, 1.0), superposition(hl, vr, 1.0),
                superposition(hr, vl, -1.0), superposition(hl, vr, -1.0)};
    }
    // B5: (|R,TEMH> ± |L,TEMV>)/sqrt2 and (|L,TEMH> ± |R,TEMV>)/sqrt2
    const PureState4 rh = tensor_state(r, h);
    const PureState4 rv = tensor_state(r, v);
    const PureState4 lh = tensor_state(l, h);
    const PureState4 lv = tensor_state(l, v);
    return {superposition(rh, lv, 1.0), superposition(rh, lv, -1.0),
            superposition(lh, rv, 1.0), superposition(lh, rv, -1.0)};
}

void check_orthonormal(const std::array<PureState4, 4> &states, BasisId b) {
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(overlap(states[i], states[j]) - expected) > kTableTol)
                throw contract_error(std::string("basis ") + basis_name(b) +
                                     " is not orthonormal");
        }
}

void check_csco(const std::array<PureState4, 4> &states,
                const std::array<Operator4, 3> &ops, BasisId b) {
    for (int a = 0; a < 3; ++a)
        for (int c = a + 1; c < 3; ++c) {
            const Mat4 comm =
                ops[a].mat() * ops[c].mat() - ops[c].mat() * ops[a].mat();
            if (comm.cwiseAbs().maxCoeff() > kTableTol)
                throw contract_error(std::string("CSCO of ") + basis_name(b) +
                                     " does not commute");
        }
    for (const Operator4 &op : ops) {
        std::array<int, 4> signatures{};
        for (int i = 0; i < 4; ++i) {
            const Vec4 image = op.mat() * states[i].amp();
            const Complex ev = states[i].amp().dot(image);
            if (std::abs(ev.imag()) > kTableTol ||
                std::abs(std::abs(ev.real()) - 1.0) > kTableTol)
                throw contract_error(std::string("CSCO eigenvalue of ") +
                                     basis_name(b) + " is not +-1");
            if ((image - ev * states[i].amp()).cwiseAbs().maxCoeff() > kTableTol)
                throw contract_error(std::string("state of ") + basis_name(b) +
                                     " is not a CSCO eigenvector");
            signatures[i] = ev.real() > 0 ? 1 : -1;
        }
        (void)signatures;
    }
}

ElementSequence basis_stage_for(BasisId b) {
    switch (b) {
    case BasisId::kB1:
        return {Element::hadamard(Target::kPol), Element::hadamard(Target::kTm)};
    case BasisId::kB2:
        return {Element::identity(Target::kPol), Element::identity(Target::kTm)};
    case BasisId::kB3:
        return {Element::phase_s(Target::kPol), Element::phase_s(Target::kTm)};
    case BasisId::kB4:
        return {Element::sagnac(M_PI / 8.0), Element::hadamard(Target::kTm),
                Element::phase_s(Target::kTm)};
    case BasisId::kB5:
        return {Element::sagnac(M_PI / 8.0), Element::phase_s(Target::kPol),
                Element::hadamard(Target::kTm)};
    }
    throw std::invalid_argument("unknown basis");
}

} // namespace

int basis_index(BasisId b) { return static_cast<int>(b); }

const char *basis_name(BasisId b) {
    static constexpr const char *kNames[5] = {"B1", "B2", "B3", "B4", "B5"};
    return kNames[basis_index(b)];
}

std::optional<BasisId> basis_from_name(std::string_view name) {
    for (BasisId b : kAllBases)
        if (name == basis_name(b))
            return b;
    return std::nullopt;
}

bool is_entangled_basis(BasisId b) {
    return b == BasisId::kB4 || b == BasisId::kB5;
}

ElementSequence PrepCircuit::full() const {
    ElementSequence seq = basis_stage;
    seq.insert(seq.end(), state_stage.begin(), state_stage.end());
    return seq;
}

const PureState4 &BasisTable::state(BasisId b, int idx) const {
    if (idx < 0 || idx > 3)
        throw std::invalid_argument("state index must be 0..3");
    return states[basis_index(b)][idx];
}

const std::array<PureState4, 4> &BasisTable::basis_states(BasisId b) const {
    return states[basis_index(b)];
}

BasisTable build_basis_table() {
    std::array<std::array<PureState4, 4>, 5> states = {
        product_basis(0), // B1: Z eigenstates
        product_basis(1), // B2: X eigenstates
        product_basis(2), // B3: Y eigenstates
        entangled_basis(BasisId::kB4),
        entangled_basis(BasisId::kB5),
    };
    std::array<std::array<Operator4, 3>, 5> csco = {
        csco_for(BasisId::kB1), csco_for(BasisId::kB2), csco_for(BasisId::kB3),
        csco_for(BasisId::kB4), csco_for(BasisId::kB5)};

    BasisTable table{states, csco, {}, {}};

    for (BasisId b : kAllBases) {
        check_orthonormal(table.states[basis_index(b)], b);
        check_csco(table.states[basis_index(b)], table.csco[basis_index(b)], b);
    }

    const UnbiasednessReport report = verify_unbiasedness(table);
    if (report.max_deviation > kTableTol)
        throw contract_error("basis table is not mutually unbiased");

    // Resolve where each state lands through its measurement circuit and
    // require an exact bijection onto the canonical basis.
    for (BasisId b : kAllBases) {
        const Operator4 m = compile(measurement_circuit(b));
        std::array<bool, 4> used{};
        for (int i = 0; i < 4; ++i) {
            const PureState4 landed = apply(m, table.state(b, i));
            int best = -1;
            for (int k = 0; k < 4; ++k) {
                if (equal_up_to_phase(landed, PureState4::computational(k))) {
                    best = k;
                    break;
                }
            }
            if (best < 0 || used[best])
                throw contract_error(
                    std::string("measurement circuit of ") + basis_name(b) +
                    " does not map onto the canonical basis");
            used[best] = true;
            table.measured_b1_index[basis_index(b)][i] = best;
            table.decode[basis_index(b)][best] = i;
        }
    }
    return table;
}

UnbiasednessReport verify_unbiasedness(const BasisTable &t) {
    UnbiasednessReport report;
    for (BasisId a : kAllBases)
        for (BasisId b : kAllBases) {
            if (a == b)
                continue;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    ++report.pair_count;
                    const double p = fidelity(t.state(a, i), t.state(b, j));
                    const double dev = std::abs(p - 0.25);
                    if (dev > report.max_deviation) {
                        report.max_deviation = dev;
                        report.worst_basis_a = a;
                        report.worst_basis_b = b;
                        report.worst_state_a = i;
                        report.worst_state_b = j;
                    }
                }
        }
    return report;
}

PureState4 prep_input() {
    return tensor_state(PureState2::xplus(), PureState2::xplus());
}

PrepCircuit prep_circuit(BasisId b, int state_idx) {
    if (state_idx < 0 || state_idx > 3)
        throw std::invalid_argument("state index must be 0..3");
    const bool pol_bit = (state_idx & 2) != 0;
    const bool tm_bit = (state_idx & 1) != 0;
    // B1 selects with H(pi/4) / MCpi(pi/4); the other bases use angle 0.
    const double sel = (b == BasisId::kB1) ? M_PI / 4.0 : 0.0;
    ElementSequence state_stage = {
        pol_bit ? Element::hwp(sel) : Element::identity(Target::kPol),
        tm_bit ? Element::mc_pi(sel) : Element::identity(Target::kTm),
    };
    return PrepCircuit{basis_stage_for(b), std::move(state_stage), prep_input()};
}

ElementSequence b2_to_b1_sequence() {
    return {Element::hwp(M_PI / 8.0), Element::mc_pi(M_PI / 8.0)};
}

ElementSequence measurement_circuit(BasisId b) {
    ElementSequence seq = inverse_sequence(basis_stage_for(b));
    const ElementSequence tail = b2_to_b1_sequence();
    seq.insert(seq.end(), tail.begin(), tail.end());
    return seq;
}

} // namespace photonkd

// The five mutually unbiased bases of the 4-dimensional polarization x TM
// space, their defining commuting-operator triples, the 20 state-preparation
// circuits (basis stage + state stage, starting from |D,TEMD>), and the
// receiver-side circuits that rotate each basis onto the canonical one.

#pragma once

#include "photonkd/core.hpp"
#include "photonkd/optics.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace photonkd {

enum class BasisId { kB1, kB2, kB3, kB4, kB5 };

inline constexpr std::array<BasisId, 5> kAllBases = {
    BasisId::kB1, BasisId::kB2, BasisId::kB3, BasisId::kB4, BasisId::kB5};

int basis_index(BasisId b);
const char *basis_name(BasisId b);
std::optional<BasisId> basis_from_name(std::string_view name);

// B4 and B5 are built from maximally entangled states; B1..B3 are products.
bool is_entangled_basis(BasisId b);

// Preparation circuit for one basis/state pair. The state stage follows the
// basis stage in propagation order; its two selector slots (HWP on pol,
// pi-converter on TM) are driven directly by the two key bits:
// state index = 2*pol_bit + tm_bit.
struct PrepCircuit {
    ElementSequence basis_stage; // includes the Sagnac setting for B4/B5
    ElementSequence state_stage; // exactly two slots, kIdentity when unset
    PureState4 input;            // always |D,TEMD>

    ElementSequence full() const;
};

struct BasisTable {
    std::array<std::array<PureState4, 4>, 5> states;
    std::array<std::array<Operator4, 3>, 5> csco;
    // Canonical-basis index reached when state i of basis b passes through
    // measurement_circuit(b). The identity for B1..B3; B4 and B5 land with
    // states 1 and 3 exchanged, so the receiver decodes through it.
    std::array<std::array<int, 4>, 5> measured_b1_index;
    // Inverse map: detected canonical index -> transmitted state index.
    std::array<std::array<int, 4>, 5> decode;

    const PureState4 &state(BasisId b, int idx) const;
    const std::array<PureState4, 4> &basis_states(BasisId b) const;
};

// Constructs and validates the full table: orthonormality, mutual
// unbiasedness, commuting CSCO triples simultaneously diagonalized by the
// states, and the measurement-circuit bijections. Throws contract_error on
// any internal inconsistency.
BasisTable build_basis_table();

struct UnbiasednessReport {
    double max_deviation = 0.0; // max | |<a|b>|^2 - 1/4 | over cross pairs
    BasisId worst_basis_a = BasisId::kB1;
    BasisId worst_basis_b = BasisId::kB2;
    int worst_state_a = 0;
    int worst_state_b = 0;
    int pair_count = 0;
};

UnbiasednessReport verify_unbiasedness(const BasisTable &t);

PureState4 prep_input(); // |D,TEMD>

PrepCircuit prep_circuit(BasisId b, int state_idx);

// Fixed rotation taking the diagonal basis to the canonical one: a HWP and a
// TM pi-converter, both at pi/8 (Hadamard on each qubit).
ElementSequence b2_to_b1_sequence();

// Inverse of the basis stage followed by b2_to_b1_sequence. Maps basis b
// onto the canonical basis; the landing order is measured_b1_index.
ElementSequence measurement_circuit(BasisId b);

} // namespace photonkd

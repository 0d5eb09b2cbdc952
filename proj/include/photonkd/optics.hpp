// Operator models for the optical elements: wave plates and mode converters
// (Jones-calculus forms), Hadamard and phase gates, the polarization-
// controlled Sagnac gate, sequence compilation and the polarizing beam
// splitter projection.

#pragma once

#include "photonkd/core.hpp"

#include <optional>
#include <vector>

namespace photonkd {

enum class ElementKind {
    kHwp,      // half-wave plate, polarization pi-converter
    kQwp,      // quarter-wave plate, polarization pi/2-converter
    kMcPi,     // cylindrical-lens TM pi-converter
    kMcHalfPi, // cylindrical-lens TM pi/2-converter
    kDove,     // Dove prism, pi-converter form on the TM factor
    kHadamard, // HWP(pi/8)-equivalent matrix on its target
    kPhaseS,   // diag(1, i) on its target
    kIdentity,
    kSagnac, // polarization-controlled TM rotation, compiled via sagnac_operator
};

enum class Target { kPol, kTm, kBoth };

struct Element {
    ElementKind kind = ElementKind::kIdentity;
    double angle = 0.0; // rotation about the propagation axis, radians
    Target target = Target::kPol;

    static Element hwp(double angle);
    static Element qwp(double angle);
    static Element mc_pi(double angle);
    static Element mc_half_pi(double angle);
    static Element dove(double angle);
    static Element hadamard(Target target);
    static Element phase_s(Target target);
    static Element identity(Target target);
    static Element sagnac(double dove_angle);
};

// Propagation-ordered: front() is the first element the photon traverses.
using ElementSequence = std::vector<Element>;

// Lifts the element's 2x2 form to the full 4-dimensional space by tensoring
// with identity on the untouched factor. Rejects kSagnac (use
// sagnac_operator, which is not a single-qubit element).
Operator4 element_operator(const Element &e);

// |H><H| (x) U(d) + |V><V| (x) U(d)†  with U(d) a TM rotation by -2d, the
// per-pass Dove-prism pattern rotation; counter-propagating components pick
// up opposite senses. U(pi/8) = (1/sqrt2)[[1,1],[-1,1]], U(0) = I.
Operator4 sagnac_operator(double dove_angle);

// Right-to-left product in propagation order: the first element the photon
// hits is applied first.
Operator4 compile(const ElementSequence &seq);

// Element sequence realizing the inverse operator, still in propagation
// order. Involutive elements invert to themselves; S and QWP-type elements
// invert as [element, matching pi-converter at the same angle].
ElementSequence inverse_sequence(const ElementSequence &seq);

// Universal rotators: compile(upr(a,b,g)) = QWP(a)·HWP(b)·QWP(g), and the
// cylindrical-lens analogue for the TM qubit.
ElementSequence upr(double alpha, double beta, double gamma);
ElementSequence utr(double alpha, double beta, double gamma);

struct PbsSplit {
    std::optional<PureState4> branch_h; // renormalized pol=H component
    std::optional<PureState4> branch_v; // renormalized pol=V component
    double p_h = 0.0;
    double p_v = 0.0;
};

// Projective Z(x)I measurement: splits psi into polarization branches.
// Branches with probability < 1e-15 are reported as absent.
PbsSplit pbs_split(const PureState4 &psi);

} // namespace photonkd

#include "photonkd/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace photonkd {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_angle(double angle) {
    if (!std::isfinite(angle))
        throw std::invalid_argument("element angle must be finite");
}

// Half-wave retarder at angle theta: R(theta)·diag(1,-1)·R(-theta).
Mat2 half_converter(double theta) {
    const double c = std::cos(2.0 * theta);
    const double s = std::sin(2.0 * theta);
    Mat2 m;
    m << c, s, s, -c;
    return m;
}

// Quarter-wave retarder, eigenvalues 1 and i, fast axis at theta.
Mat2 quarter_converter(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Mat2 m;
    m << c * c + kI * s * s, (1.0 - kI) * c * s, (1.0 - kI) * c * s,
        s * s + kI * c * c;
    return m;
}

Mat2 rotation(double alpha) {
    const double c = std::cos(alpha);
    const double s = std::sin(alpha);
    Mat2 m;
    m << c, -s, s, c;
    return m;
}

Mat2 jones_2x2(const Element &e) {
    switch (e.kind) {
    case ElementKind::kHwp:
    case ElementKind::kMcPi:
    case ElementKind::kDove:
        return half_converter(e.angle);
    case ElementKind::kQwp:
    case ElementKind::kMcHalfPi:
        return quarter_converter(e.angle);
    case ElementKind::kHadamard:
        return half_converter(M_PI / 8.0);
    case ElementKind::kPhaseS: {
        Mat2 m;
        m << 1, 0, 0, kI;
        return m;
    }
    case ElementKind::kIdentity:
        return Mat2::Identity();
    case ElementKind::kSagnac:
        break;
    }
    throw std::invalid_argument("element has no single-qubit form");
}

Element make(ElementKind kind, double angle, Target target) {
    check_angle(angle);
    return Element{kind, angle, target};
}

} // namespace

Element Element::hwp(double angle) { return make(ElementKind::kHwp, angle, Target::kPol); }
Element Element::qwp(double angle) { return make(ElementKind::kQwp, angle, Target::kPol); }
Element Element::mc_pi(double angle) { return make(ElementKind::kMcPi, angle, Target::kTm); }
Element Element::mc_half_pi(double angle) {
    return make(ElementKind::kMcHalfPi, angle, Target::kTm);
}
Element Element::dove(double angle) { return make(ElementKind::kDove, angle, Target::kTm); }

Element Element::hadamard(Target target) {
    if (target == Target::kBoth)
        throw std::invalid_argument("hadamard acts on a single qubit");
    return make(ElementKind::kHadamard, 0.0, target);
}

Element Element::phase_s(Target target) {
    if (target == Target::kBoth)
        throw std::invalid_argument("phase gate acts on a single qubit");
    return make(ElementKind::kPhaseS, 0.0, target);
}

Element Element::identity(Target target) {
    if (target == Target::kBoth)
        throw std::invalid_argument("identity element targets a single qubit");
    return make(ElementKind::kIdentity, 0.0, target);
}

Element Element::sagnac(double dove_angle) {
    return make(ElementKind::kSagnac, dove_angle, Target::kBoth);
}

Operator4 element_operator(const Element &e) {
    if (e.kind == ElementKind::kSagnac)
        throw std::invalid_argument(
            "sagnac is a two-qubit device; use sagnac_operator");
    if (e.target == Target::kBoth)
        throw std::invalid_argument("single-qubit element cannot target both qubits");
    const bool pol_only =
        e.kind == ElementKind::kHwp || e.kind == ElementKind::kQwp;
    const bool tm_only = e.kind == ElementKind::kMcPi ||
                         e.kind == ElementKind::kMcHalfPi ||
                         e.kind == ElementKind::kDove;
    if (pol_only && e.target != Target::kPol)
        throw std::invalid_argument("wave plates act on the polarization qubit");
    if (tm_only && e.target != Target::kTm)
        throw std::invalid_argument("mode converters act on the TM qubit");
    check_angle(e.angle);

    const Operator2 u((Mat2(jones_2x2(e))));
    const Operator2 eye = Operator2::identity();
    return e.target == Target::kPol ? tensor(u, eye) : tensor(eye, u);
}

Operator4 sagnac_operator(double dove_angle) {
    check_angle(dove_angle);
    // Pattern rotation of 2*dove_angle per pass; the two propagation
    // directions acquire opposite senses, giving U and U† blocks.
    const Mat2 u = rotation(-2.0 * dove_angle);
    Mat4 out = Mat4::Zero();
    out.block<2, 2>(0, 0) = u;
    out.block<2, 2>(2, 2) = u.adjoint();
    return Operator4(out);
}

Operator4 compile(const ElementSequence &seq) {
    if (seq.empty())
        throw std::invalid_argument("cannot compile an empty element sequence");
    Mat4 acc = Mat4::Identity();
    for (const Element &e : seq) {
        const Operator4 op = e.kind == ElementKind::kSagnac
                                 ? sagnac_operator(e.angle)
                                 : element_operator(e);
        acc = op.mat() * acc;
    }
    return Operator4(acc);
}

ElementSequence inverse_sequence(const ElementSequence &seq) {
    ElementSequence out;
    for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
        const Element &e = *it;
        switch (e.kind) {
        case ElementKind::kHwp:
        case ElementKind::kMcPi:
        case ElementKind::kDove:
        case ElementKind::kHadamard:
        case ElementKind::kIdentity:
            out.push_back(e); // involution (up to global phase)
            break;
        case ElementKind::kQwp:
            // HWP(t)·QWP(t) = QWP(t)†
            out.push_back(e);
            out.push_back(Element::hwp(e.angle));
            break;
        case ElementKind::kMcHalfPi:
            out.push_back(e);
            out.push_back(Element::mc_pi(e.angle));
            break;
        case ElementKind::kPhaseS:
            // Z·S = S†; Z on either qubit is the pi-converter at angle 0.
            out.push_back(e);
            out.push_back(e.target == Target::kPol ? Element::hwp(0.0)
                                                   : Element::mc_pi(0.0));
            break;
        case ElementKind::kSagnac:
            out.push_back(Element::sagnac(-e.angle));
            break;
        }
    }
    return out;
}

ElementSequence upr(double alpha, double beta, double gamma) {
    return {Element::qwp(gamma), Element::hwp(beta), Element::qwp(alpha)};
}

ElementSequence utr(double alpha, double beta, double gamma) {
    return {Element::mc_half_pi(gamma), Element::mc_pi(beta),
            Element::mc_half_pi(alpha)};
}

PbsSplit pbs_split(const PureState4 &psi) {
    constexpr double kVanish = 1e-15;
    PbsSplit out;
    Vec4 h = Vec4::Zero();
    Vec4 v = Vec4::Zero();
    h(0) = psi[0];
    h(1) = psi[1];
    v(2) = psi[2];
    v(3) = psi[3];
    out.p_h = h.squaredNorm();
    out.p_v = v.squaredNorm();
    if (out.p_h >= kVanish)
        out.branch_h = PureState4(Vec4(h / std::sqrt(out.p_h)));
    if (out.p_v >= kVanish)
        out.branch_v = PureState4(Vec4(v / std::sqrt(out.p_v)));
    return out;
}

} // namespace photonkd

#include "photonkd/core.hpp"

#include <cmath>

namespace photonkd {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

template <typename V> bool finite(const V &v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag()))
            return false;
    }
    return true;
}

template <typename M> bool finite_mat(const M &m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag()))
                return false;
    return true;
}

template <typename V> V checked_state(const V &amp) {
    if (!finite(amp))
        throw contract_error("state amplitudes must be finite");
    if (std::abs(amp.squaredNorm() - 1.0) > kStateNormTol)
        throw contract_error("state is not normalized");
    return amp;
}

template <typename V> V normalized_or_throw(const V &amp) {
    if (!finite(amp))
        throw contract_error("state amplitudes must be finite");
    const double n = amp.norm();
    if (n < 1e-100)
        throw contract_error("cannot normalize a zero vector");
    return amp / n;
}

template <typename M> M checked_unitary(const M &m) {
    if (!finite_mat(m))
        throw contract_error("operator entries must be finite");
    const M gram = m.adjoint() * m;
    const M eye = M::Identity();
    if ((gram - eye).cwiseAbs().maxCoeff() > kUnitaryTol)
        throw contract_error("operator is not unitary");
    return m;
}

// SplitMix64 finalizer; used to decorrelate derived stream seeds.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

PureState2::PureState2(const Vec2 &amp) : amp_(checked_state(amp)) {}

PureState2 PureState2::from_unnormalized(const Vec2 &amp) {
    return PureState2(normalized_or_throw(amp));
}

PureState2 PureState2::z0() { return PureState2(Vec2(1.0, 0.0)); }
PureState2 PureState2::z1() { return PureState2(Vec2(0.0, 1.0)); }
PureState2 PureState2::xplus() {
    return PureState2(Vec2(kInvSqrt2, kInvSqrt2));
}
PureState2 PureState2::xminus() {
    return PureState2(Vec2(kInvSqrt2, -kInvSqrt2));
}
PureState2 PureState2::yplus() {
    return PureState2(Vec2(Complex(kInvSqrt2, 0.0), Complex(0.0, kInvSqrt2)));
}
PureState2 PureState2::yminus() {
    return PureState2(Vec2(Complex(kInvSqrt2, 0.0), Complex(0.0, -kInvSqrt2)));
}

PureState4::PureState4(const Vec4 &amp) : amp_(checked_state(amp)) {}

PureState4 PureState4::from_unnormalized(const Vec4 &amp) {
    return PureState4(normalized_or_throw(amp));
}

PureState4 PureState4::computational(int index) {
    if (index < 0 || index > 3)
        throw std::invalid_argument("computational basis index must be 0..3");
    Vec4 v = Vec4::Zero();
    v(index) = 1.0;
    return PureState4(v);
}

Operator2::Operator2(const Mat2 &m) : mat_(checked_unitary(m)) {}

Operator2 Operator2::adjoint() const { return Operator2(mat_.adjoint()); }

Operator2 Operator2::identity() { return Operator2(Mat2::Identity()); }
Operator2 Operator2::pauli_x() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return Operator2(m);
}
Operator2 Operator2::pauli_y() {
    Mat2 m;
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return Operator2(m);
}
Operator2 Operator2::pauli_z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return Operator2(m);
}

Operator4::Operator4(const Mat4 &m) : mat_(checked_unitary(m)) {}

Operator4 Operator4::adjoint() const { return Operator4(mat_.adjoint()); }

Operator4 Operator4::identity() { return Operator4(Mat4::Identity()); }

Operator4 operator*(const Operator4 &a, const Operator4 &b) {
    return Operator4(a.mat() * b.mat());
}

Operator4 tensor(const Operator2 &a, const Operator2 &b) {
    Mat4 out;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            out.block<2, 2>(2 * r, 2 * c) = a.mat()(r, c) * b.mat();
    return Operator4(out);
}

PureState4 tensor_state(const PureState2 &pol, const PureState2 &tm) {
    Vec4 out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(2 * i + j) = pol[i] * tm[j];
    return PureState4(out);
}

PureState4 apply(const Operator4 &op, const PureState4 &psi) {
    Vec4 out = op.mat() * psi.amp();
    const double n = out.norm();
    if (std::abs(n - 1.0) > 1e-6)
        throw contract_error("apply produced abnormal norm drift");
    return PureState4(out / n);
}

Complex overlap(const PureState4 &a, const PureState4 &b) {
    return a.amp().dot(b.amp()); // Eigen dot() conjugates the first factor
}

double fidelity(const PureState4 &a, const PureState4 &b) {
    return std::norm(overlap(a, b));
}

bool equal_up_to_phase(const PureState4 &a, const PureState4 &b, double tol) {
    return std::abs(overlap(a, b)) > 1.0 - tol;
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), gen_(mix64(seed)) {}

RandomStream RandomStream::derive(std::uint64_t stream_index) const {
    return RandomStream(mix64(seed_ ^ mix64(stream_index + 1)));
}

std::uint64_t RandomStream::next_u64() { return gen_(); }

double RandomStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint32_t RandomStream::uniform_below(std::uint32_t n) {
    if (n == 0)
        throw std::invalid_argument("uniform_below(0)");
    // Lemire's unbiased bounded sampling.
    while (true) {
        const std::uint64_t x = next_u64() >> 32;
        const std::uint64_t m = x * n;
        const std::uint32_t low = static_cast<std::uint32_t>(m);
        if (low >= n) {
            const std::uint32_t threshold = (0u - n) % n;
            if (low < threshold)
                continue;
        }
        return static_cast<std::uint32_t>(m >> 32);
    }
}

bool RandomStream::bernoulli(double p) { return uniform() < p; }

int born_sample(const PureState4 &psi, const std::array<PureState4, 4> &basis,
                RandomStream &rng) {
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const Complex g = overlap(basis[i], basis[j]);
            const double expected = (i == j) ? 1.0 : 0.0;
            if (std::abs(g - expected) > kUnitaryTol)
                throw contract_error("born_sample basis is not orthonormal");
        }
    }
    std::array<double, 4> p{};
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        p[i] = fidelity(basis[i], psi);
        total += p[i];
    }
    const double r = rng.uniform() * total;
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        acc += p[i];
        if (r < acc)
            return i;
    }
    return 3;
}

} // namespace photonkd

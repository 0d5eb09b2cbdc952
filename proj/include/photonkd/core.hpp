// Exact complex linear algebra for the 2- and 4-dimensional state space of a
// polarization x transverse-mode photon, plus Born-rule sampling and the
// seeded random stream used everywhere randomness is needed.
//
// Basis ordering of the 4-dimensional space is fixed throughout the project:
//   index = 2*pol + tm  with  pol: 0=|H>, 1=|V>   tm: 0=|TEMH>, 1=|TEMV>
// i.e. |H,TEMH>, |H,TEMV>, |V,TEMH>, |V,TEMV>.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace photonkd {

using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

// One 0/1 value per entry.
using BitString = std::vector<std::uint8_t>;

// Thrown when a value violates a module contract: non-unitary operator,
// unnormalized state, non-orthonormal measurement basis, NaN amplitudes.
struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};

inline constexpr double kStateNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kPhaseEqualTol = 1e-10;

// Normalized single-qubit state (used for both polarization and TM qubits).
class PureState2 {
  public:
    PureState2() : amp_(1.0, 0.0) {} // |0>
    explicit PureState2(const Vec2 &amp);
    static PureState2 from_unnormalized(const Vec2 &amp);

    const Vec2 &amp() const { return amp_; }
    Complex operator[](int i) const { return amp_(i); }

    // z eigenstates |0>,|1>; x eigenstates |+>,|->; y eigenstates |R>,|L>.
    static PureState2 z0();
    static PureState2 z1();
    static PureState2 xplus();
    static PureState2 xminus();
    static PureState2 yplus();
    static PureState2 yminus();

  private:
    Vec2 amp_;
};

// Normalized two-qubit state in the fixed |pol,TM> ordering.
class PureState4 {
  public:
    PureState4() : amp_(Vec4::Unit(0)) {} // |H,TEMH>
    explicit PureState4(const Vec4 &amp);
    static PureState4 from_unnormalized(const Vec4 &amp);
    static PureState4 computational(int index);

    const Vec4 &amp() const { return amp_; }
    Complex operator[](int i) const { return amp_(i); }

  private:
    Vec4 amp_;
};

// Unitary 2x2 operator. U†U = I is validated on construction.
class Operator2 {
  public:
    Operator2() : mat_(Mat2::Identity()) {}
    explicit Operator2(const Mat2 &m);
    const Mat2 &mat() const { return mat_; }
    Operator2 adjoint() const;

    static Operator2 identity();
    static Operator2 pauli_x();
    static Operator2 pauli_y();
    static Operator2 pauli_z();

  private:
    Mat2 mat_;
};

// Unitary 4x4 operator, same construction contract.
class Operator4 {
  public:
    Operator4() : mat_(Mat4::Identity()) {}
    explicit Operator4(const Mat4 &m);
    const Mat4 &mat() const { return mat_; }
    Operator4 adjoint() const;

    static Operator4 identity();

  private:
    Mat4 mat_;
};

Operator4 operator*(const Operator4 &a, const Operator4 &b);

// Kronecker product with the polarization factor first, matching the
// PureState4 index ordering.
Operator4 tensor(const Operator2 &a, const Operator2 &b);
PureState4 tensor_state(const PureState2 &pol, const PureState2 &tm);

// Matrix-vector product; the result is renormalized only to absorb rounding.
PureState4 apply(const Operator4 &op, const PureState4 &psi);

// <a|b>, conjugation on the first argument.
Complex overlap(const PureState4 &a, const PureState4 &b);
double fidelity(const PureState4 &a, const PureState4 &b);

// States compare equal when |<a|b>| > 1 - kPhaseEqualTol (global phase is
// unobservable; the state tables are defined only up to it).
bool equal_up_to_phase(const PureState4 &a, const PureState4 &b,
                       double tol = kPhaseEqualTol);

// Deterministic random stream with explicit 64-bit seeding. Child streams for
// parallel workers are derived from the root seed by index, never from the
// generator state, so results do not depend on draw interleaving.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed);

    RandomStream derive(std::uint64_t stream_index) const;

    std::uint64_t next_u64();
    // Uniform in [0,1) with 53 random bits; fixed mapping, so sequences are
    // identical across platforms for a given seed.
    double uniform();
    std::uint32_t uniform_below(std::uint32_t n);
    bool bernoulli(double p);

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

// Samples index i with probability |<basis_i|psi>|^2. The basis must be
// orthonormal within kUnitaryTol.
int born_sample(const PureState4 &psi, const std::array<PureState4, 4> &basis,
                RandomStream &rng);

} // namespace photonkd

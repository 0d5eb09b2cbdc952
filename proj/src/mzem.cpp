#include "photonkd/mzem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace photonkd {

namespace {

constexpr int kMinGrid = 256;

double hermite_poly(int order, double x) {
    // Physicists' Hermite polynomials; only low orders are ever requested.
    double hm = 1.0;
    if (order == 0)
        return hm;
    double h = 2.0 * x;
    for (int k = 1; k < order; ++k) {
        const double next = 2.0 * x * h - 2.0 * k * hm;
        hm = h;
        h = next;
    }
    return h;
}

// 6-point Lagrange interpolation along one grid row. Points outside the
// sampled extent are treated as zero field.
Complex sample_row(const ModeProfile &m, int row, double x) {
    if (x <= -m.extent || x >= m.extent)
        return Complex(0.0, 0.0);
    const double h = 2.0 * m.extent / m.n;
    const double t = (x + m.extent) / h - 0.5; // fractional cell-center index
    int start = static_cast<int>(std::floor(t)) - 2;
    if (start < 0)
        start = 0;
    if (start > m.n - 6)
        start = m.n - 6;
    Complex acc(0.0, 0.0);
    for (int a = 0; a < 6; ++a) {
        double w = 1.0;
        for (int bidx = 0; bidx < 6; ++bidx) {
            if (bidx == a)
                continue;
            w *= (t - (start + bidx)) / static_cast<double>(a - bidx);
        }
        acc += w * m.at(row, start + a);
    }
    return acc;
}

} // namespace

MzemSettings MzemSettings::ideal() { return MzemSettings{}; }

MzemSettings MzemSettings::with_visibility(double v) {
    MzemSettings s;
    s.visibility_a.fill(v);
    s.visibility_b.fill(v);
    s.validate();
    return s;
}

MzemSettings MzemSettings::preset(std::string_view name) {
    if (name == "paper-tableIV") {
        MzemSettings s;
        s.visibility_a = {0.95, 0.91, 0.65, 0.68};
        s.visibility_b = {0.98, 0.95, 0.83, 0.75};
        return s;
    }
    throw std::invalid_argument("unknown mzem preset: " + std::string(name));
}

void MzemSettings::validate() const {
    if (!std::isfinite(phi))
        throw std::invalid_argument("mzem phi must be finite");
    if (!(bs_ratio > 0.0 && bs_ratio < 1.0))
        throw std::invalid_argument("mzem bs_ratio must lie in (0,1)");
    for (int k = 0; k < 4; ++k) {
        if (!(visibility_a[k] >= 0.0 && visibility_a[k] <= 1.0) ||
            !(visibility_b[k] >= 0.0 && visibility_b[k] <= 1.0))
            throw std::invalid_argument("mzem visibility must lie in [0,1]");
    }
}

Operator4 parity_operator() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    m(2, 2) = -1.0;
    m(3, 3) = 1.0;
    return Operator4(m);
}

int canonical_parity(int canonical_index) {
    return (canonical_index == 0 || canonical_index == 3) ? 1 : -1;
}

double port_a_probability_for_state(int canonical_index, const MzemSettings &s) {
    if (canonical_index < 0 || canonical_index > 3)
        throw std::invalid_argument("canonical index must be 0..3");
    const double sign = canonical_parity(canonical_index) *
                        (s.port_a_collects_even ? 1.0 : -1.0);
    const double fringe = sign * std::cos(s.phi);
    const double raw_a = s.bs_ratio * (1.0 + s.visibility_a[canonical_index] * fringe);
    const double raw_b =
        (1.0 - s.bs_ratio) * (1.0 - s.visibility_b[canonical_index] * fringe);
    return raw_a / (raw_a + raw_b);
}

PortProbabilities port_probabilities(const PureState4 &psi, const MzemSettings &s) {
    s.validate();
    constexpr double kVanish = 1e-15;
    PortProbabilities out;
    double p_a = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double w = std::norm(psi[k]);
        p_a += w * port_a_probability_for_state(k, s);
    }
    out.p_a = p_a;
    out.p_b = 1.0 - p_a;

    // Parity components, assigned to the exit that collects them ideally.
    Vec4 even = Vec4::Zero();
    Vec4 odd = Vec4::Zero();
    even(0) = psi[0];
    even(3) = psi[3];
    odd(1) = psi[1];
    odd(2) = psi[2];
    const double p_even = even.squaredNorm();
    const double p_odd = odd.squaredNorm();
    std::optional<PureState4> even_state, odd_state;
    if (p_even >= kVanish)
        even_state = PureState4(Vec4(even / std::sqrt(p_even)));
    if (p_odd >= kVanish)
        odd_state = PureState4(Vec4(odd / std::sqrt(p_odd)));
    out.state_a = s.port_a_collects_even ? even_state : odd_state;
    out.state_b = s.port_a_collects_even ? odd_state : even_state;
    return out;
}

DetectionEvent detect(const PureState4 &psi, const MzemSettings &s,
                      RandomStream &rng) {
    s.validate();
    std::array<double, 4> w{};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
        w[k] = std::norm(psi[k]);
        total += w[k];
    }
    const double r = rng.uniform() * total;
    int k = 3;
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) {
        acc += w[c];
        if (r < acc) {
            k = c;
            break;
        }
    }
    const double p_a = port_a_probability_for_state(k, s);
    DetectionEvent ev;
    ev.port = rng.uniform() < p_a ? Port::kA : Port::kB;
    ev.pol = k >> 1;
    return ev;
}

int inferred_canonical_index(const DetectionEvent &ev, const MzemSettings &s) {
    const bool even = (ev.port == Port::kA) == s.port_a_collects_even;
    const int parity = even ? 1 : -1;
    const int pol_sign = ev.pol == 0 ? 1 : -1;
    const int tm = (parity * pol_sign) > 0 ? 0 : 1;
    return 2 * ev.pol + tm;
}

ModeProfile ModeProfile::hermite_gaussian(int order_x, int order_y, double waist,
                                          int n, double extent) {
    if (order_x < 0 || order_y < 0)
        throw std::invalid_argument("mode orders must be nonnegative");
    if (!(waist > 0.0) || !std::isfinite(waist))
        throw std::invalid_argument("waist must be positive");
    if (n < kMinGrid)
        throw std::invalid_argument("grid resolution must be at least 256");
    if (extent <= 0.0)
        extent = 6.0 * waist;

    ModeProfile m;
    m.n = n;
    m.extent = extent;
    m.waist = waist;
    m.grid.resize(static_cast<std::size_t>(n) * n);
    const double inv_w = 1.0 / waist;
    double norm2 = 0.0;
    for (int row = 0; row < n; ++row) {
        const double y = m.coord(row);
        const double hy = hermite_poly(order_y, std::sqrt(2.0) * y * inv_w);
        for (int col = 0; col < n; ++col) {
            const double x = m.coord(col);
            const double hx = hermite_poly(order_x, std::sqrt(2.0) * x * inv_w);
            const double u =
                hx * hy * std::exp(-(x * x + y * y) * inv_w * inv_w);
            m.grid[static_cast<std::size_t>(row) * n + col] = u;
            norm2 += u * u;
        }
    }
    const double da = (2.0 * extent / n) * (2.0 * extent / n);
    const double scale = 1.0 / std::sqrt(norm2 * da);
    for (Complex &c : m.grid)
        c *= scale;
    return m;
}

Complex mirror_overlap(const ModeProfile &m, double dx_waists) {
    if (!std::isfinite(dx_waists))
        throw std::invalid_argument("displacement must be finite");
    if (m.n < kMinGrid || m.grid.size() != static_cast<std::size_t>(m.n) * m.n)
        throw std::invalid_argument("mode profile grid is malformed");
    const double dx = dx_waists * m.waist;
    if (m.extent < 4.0 * m.waist + 2.0 * std::abs(dx))
        throw std::invalid_argument(
            "grid extent too small for requested displacement");

    // Substituting x -> x + dx turns the integral into the overlap of u with
    // its x-reflection shifted by 2*dx; only the second factor leaves the
    // sample points, so one row interpolation suffices.
    const double h = 2.0 * m.extent / m.n;
    Complex acc(0.0, 0.0);
    for (int row = 0; row < m.n; ++row) {
        Complex row_acc(0.0, 0.0);
        for (int col = 0; col < m.n; ++col) {
            const double x = m.coord(col);
            const Complex mirrored = sample_row(m, row, -x - 2.0 * dx);
            row_acc += std::conj(m.at(row, col)) * mirrored;
        }
        acc += row_acc;
    }
    return acc * h * h;
}

double path_difference(double displacement) {
    if (!std::isfinite(displacement))
        throw std::invalid_argument("displacement must be finite");
    return std::sqrt(2.0) * displacement;
}

} // namespace photonkd

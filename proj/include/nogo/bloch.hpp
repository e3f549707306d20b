// bloch.hpp
// Qubit preparations as real 3-vectors in the operational x-z(-y) space,
// the dephasing channel, equatorial-axis rotations, and the one-parameter
// ensemble family used throughout.

#pragma once

#include <cmath>
#include <stdexcept>

namespace nogo {

// Physicality slack for derived numerics; construction identities hold to 1e-12.
inline constexpr double kPhysicalTol = 1e-9;

struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
    bool physical(double tol = kPhysicalTol) const { return norm2() <= 1.0 + 2.0 * tol; }
};

inline BlochVector operator+(const BlochVector& a, const BlochVector& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline BlochVector operator-(const BlochVector& a, const BlochVector& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline BlochVector operator*(double s, const BlochVector& v) {
    return {s * v.x, s * v.y, s * v.z};
}
inline double dot(const BlochVector& a, const BlochVector& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

// Binary observable along one of the coordinate axes. A = sigma_x and
// B = sigma_z carry the criteria; Y = sigma_y is the calibration axis.
struct Observable {
    enum class Label { A, B, Y };

    BlochVector axis;  // exact unit vector by construction
    Label label;

    static Observable sigma_x() { return {{1.0, 0.0, 0.0}, Label::A}; }
    static Observable sigma_y() { return {{0.0, 1.0, 0.0}, Label::Y}; }
    static Observable sigma_z() { return {{0.0, 0.0, 1.0}, Label::B}; }
};

// <obs> on a preparation: projection of the state onto the measurement axis.
inline double expectation(const BlochVector& state, const Observable& obs) {
    if (!state.physical()) {
        throw std::invalid_argument("expectation: state norm exceeds 1");
    }
    double e = dot(state, obs.axis);
    return e < -1.0 ? -1.0 : (e > 1.0 ? 1.0 : e);
}

// Dephasing channel: shrinks the equatorial components by (1 - mu), keeps z.
inline BlochVector dephase(const BlochVector& state, double mu) {
    if (!(mu >= 0.0 && mu <= 1.0)) {
        throw std::invalid_argument("dephase: mu must lie in [0, 1]");
    }
    return {state.x * (1.0 - mu), state.y * (1.0 - mu), state.z};
}

// Bloch-space action of the rotation gate with angle big_theta about the
// equatorial axis (cos phi, sin phi, 0): Rodrigues' formula.
inline BlochVector rotate(const BlochVector& state, double big_theta, double phi) {
    const BlochVector u{std::cos(phi), std::sin(phi), 0.0};
    const double c = std::cos(big_theta);
    const double s = std::sin(big_theta);
    const double k = (1.0 - c) * dot(u, state);
    const BlochVector cross{u.y * state.z - u.z * state.y,
                            u.z * state.x - u.x * state.z,
                            u.x * state.y - u.y * state.x};
    return {state.x * c + cross.x * s + u.x * k,
            state.y * c + cross.y * s + u.y * k,
            state.z * c + cross.z * s + u.z * k};
}

// Four pure preparations whose two mixtures meet at a common point of the
// x-z disc, plus the weight t at which they meet.
struct EnsembleQuartet {
    BlochVector eps_plus;
    BlochVector eps_minus;
    BlochVector eps_prime_plus;
    BlochVector eps_prime_minus;
    double theta = 0.0;
    double t = 0.5;

    // t*eps_plus + (1-t)*eps_minus, the common point of the two mixtures.
    BlochVector intersection() const { return t * eps_plus + (1.0 - t) * eps_minus; }
};

// The one-parameter family: m_pm = (cos(theta) +- d)/2 with d = sqrt(2 - cos^2),
// so m_plus^2 + m_minus^2 = 1 and all four vectors are unit vectors.
inline EnsembleQuartet ensemble_quartet(double theta) {
    if (!(theta >= 0.0 && theta <= std::acos(-1.0) / 2.0 + 1e-15)) {
        throw std::invalid_argument("ensemble_quartet: theta must lie in [0, pi/2]");
    }
    const double c = std::cos(theta);
    const double d = std::sqrt(2.0 - c * c);
    const double m_plus = 0.5 * (c + d);
    const double m_minus = 0.5 * (c - d);
    const double a = -m_minus;  // equals sqrt(1 - m_plus^2)
    const double b = m_plus;    // equals sqrt(1 - m_minus^2)

    EnsembleQuartet q;
    q.eps_plus = {a, 0.0, b};
    q.eps_minus = {-b, 0.0, -a};
    q.eps_prime_plus = {b, 0.0, -a};
    q.eps_prime_minus = {-a, 0.0, b};
    q.theta = theta;
    // Unique weight with t*eps_plus + (1-t)*eps_minus == (1-t)*eps_prime_plus
    // + t*eps_prime_minus; degenerates to t = 1 only at theta = 0.
    q.t = (d + c) / (2.0 * d);
    return q;
}

}  // namespace nogo

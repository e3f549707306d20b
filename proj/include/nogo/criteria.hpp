// criteria.hpp
// Joint-reality tests on a quartet of preparations: the per-ensemble
// constraint region, the linear witness ell_c with its closed-form
// maximization over c, the nonlinear determinant witness tau maximized over
// the eight admissible sign choices, and the closed-form robustness curves
// of the dephased one-parameter family.

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "nogo/bloch.hpp"

namespace nogo {

// <A>, <B> on each of eps_plus, eps_minus, eps_prime_plus, eps_prime_minus.
struct ExpectationQuartet {
    double a_ep = 0.0, b_ep = 0.0;
    double a_em = 0.0, b_em = 0.0;
    double a_epp = 0.0, b_epp = 0.0;
    double a_epm = 0.0, b_epm = 0.0;
};

// Expectations of A = sigma_x, B = sigma_z on the dephased quartet.
inline ExpectationQuartet expectation_quartet(const EnsembleQuartet& q, double mu = 0.0) {
    const Observable a = Observable::sigma_x();
    const Observable b = Observable::sigma_z();
    ExpectationQuartet e;
    e.a_ep = expectation(dephase(q.eps_plus, mu), a);
    e.b_ep = expectation(dephase(q.eps_plus, mu), b);
    e.a_em = expectation(dephase(q.eps_minus, mu), a);
    e.b_em = expectation(dephase(q.eps_minus, mu), b);
    e.a_epp = expectation(dephase(q.eps_prime_plus, mu), a);
    e.b_epp = expectation(dephase(q.eps_prime_plus, mu), b);
    e.a_epm = expectation(dephase(q.eps_prime_minus, mu), a);
    e.b_epm = expectation(dephase(q.eps_prime_minus, mu), b);
    return e;
}

// One of the eight sign patterns with p*q*r*s == -1.
struct SignChoice {
    int p = 1, q = 1, r = 1, s = -1;
};

inline const std::array<SignChoice, 8>& valid_sign_choices() {
    static const std::array<SignChoice, 8> choices = [] {
        std::array<SignChoice, 8> out{};
        int n = 0;
        for (int p : {1, -1})
            for (int q : {1, -1})
                for (int r : {1, -1})
                    for (int s : {1, -1})
                        if (p * q * r * s == -1) out[n++] = {p, q, r, s};
        return out;
    }();
    return choices;
}

enum class ConstraintRegion { ForcesAbove, ForcesBelow, Unconstrained };

// Which side of <AB> = c a joint-reality assignment is forced onto by the
// observed single-observable averages.
inline ConstraintRegion constraint_region(double exp_a, double exp_b, double c) {
    if (!(c > -1.0 && c < 1.0)) {
        throw std::invalid_argument("constraint_region: c must lie in (-1, 1)");
    }
    const double sum = exp_a + exp_b;
    const double diff = exp_a - exp_b;
    if (sum > 1.0 + c || sum < -1.0 - c) return ConstraintRegion::ForcesAbove;
    if (diff > 1.0 - c || diff < -1.0 + c) return ConstraintRegion::ForcesBelow;
    return ConstraintRegion::Unconstrained;
}

// Linear witness: min of the four bracketed excesses; positive values are
// incompatible with joint reality.
inline double linear_criterion(const ExpectationQuartet& q, double c) {
    if (!(c > -1.0 && c < 1.0)) {
        throw std::invalid_argument("linear_criterion: c must lie in (-1, 1)");
    }
    const double t1 = q.a_ep + q.b_ep - 1.0 - c;
    const double t2 = -q.a_em - q.b_em - 1.0 - c;
    const double t3 = q.a_epp - q.b_epp - 1.0 + c;
    const double t4 = -q.a_epm + q.b_epm - 1.0 + c;
    return std::min(std::min(t1, t2), std::min(t3, t4));
}

struct LinearMax {
    double ell = 0.0;
    double c_star = 0.0;
};

// ell_c = min(f - c, g + c) with f, g independent of c, so the max over c
// sits where the decreasing and increasing envelopes cross; the crossing is
// clamped into (-1, 1) when it falls outside.
inline LinearMax linear_criterion_max(const ExpectationQuartet& q) {
    const double f = std::min(q.a_ep + q.b_ep - 1.0, -q.a_em - q.b_em - 1.0);
    const double g = std::min(q.a_epp - q.b_epp - 1.0, -q.a_epm + q.b_epm - 1.0);
    double c = 0.5 * (f - g);
    const double lim = 1.0 - 1e-12;
    c = c < -lim ? -lim : (c > lim ? lim : c);
    return {std::min(f - c, g + c), c};
}

// 4x4 determinant of the nonlinear witness for one sign choice. Cofactor
// expansion keeps the evaluation bit-reproducible.
inline double reality_determinant(const ExpectationQuartet& q, const SignChoice& sc) {
    const double m[4][4] = {
        {q.a_ep, q.b_ep, sc.p * q.a_ep + sc.q * q.b_ep - 1.0, 1.0},
        {q.a_epp, q.b_epp, sc.r * q.a_epp + sc.s * q.b_epp + 1.0, 1.0},
        {q.a_epm, q.b_epm, -sc.r * q.a_epm - sc.s * q.b_epm + 1.0, 1.0},
        {q.a_em, q.b_em, -sc.p * q.a_em - sc.q * q.b_em - 1.0, 1.0},
    };
    auto det3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
        return m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) -
               m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0]) +
               m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
    };
    return m[0][0] * det3(1, 2, 3, 1, 2, 3) - m[0][1] * det3(1, 2, 3, 0, 2, 3) +
           m[0][2] * det3(1, 2, 3, 0, 1, 3) - m[0][3] * det3(1, 2, 3, 0, 1, 2);
}

struct NonlinearMax {
    double tau = 0.0;
    SignChoice best{};
};

// Max of the determinant over the eight sign choices; positive iff joint
// reality is ruled out.
inline NonlinearMax nonlinear_criterion(const ExpectationQuartet& q) {
    NonlinearMax out{-std::numeric_limits<double>::infinity(), {}};
    for (const SignChoice& sc : valid_sign_choices()) {
        const double d = reality_determinant(q, sc);
        if (d > out.tau) {
            out.tau = d;
            out.best = sc;
        }
    }
    return out;
}

namespace detail {
inline void check_theta_mu(const char* who, double theta, double mu) {
    if (!(theta >= 0.0 && theta <= std::acos(-1.0) / 2.0 + 1e-15)) {
        throw std::invalid_argument(std::string(who) + ": theta must lie in [0, pi/2]");
    }
    if (!(mu >= 0.0 && mu <= 1.0)) {
        throw std::invalid_argument(std::string(who) + ": mu must lie in [0, 1]");
    }
}
}  // namespace detail

// Closed-form maximal linear violation of the dephased family.
inline double ell_theta_mu(double theta, double mu) {
    detail::check_theta_mu("ell_theta_mu", theta, mu);
    const double c = std::cos(theta);
    const double d = std::sqrt(2.0 - c * c);
    const double m_plus = 0.5 * (c + d);
    return -mu * m_plus + d - 1.0;
}

// Closed-form maximal nonlinear violation of the dephased family.
inline double tau_theta_mu(double theta, double mu) {
    detail::check_theta_mu("tau_theta_mu", theta, mu);
    const double c = std::cos(theta);
    const double d = std::sqrt(2.0 - c * c);
    const double s2 = std::sin(theta) * std::sin(theta);
    return 4.0 * d * (1.0 - mu) * (-mu * s2 + d * (d - 1.0));
}

// Combined evaluation of both witnesses on one quartet. The std fields are
// filled by the bootstrap when the quartet came from finite sampling.
struct CriterionReport {
    double ell = 0.0;
    double ell_argmax_c = 0.0;
    double tau = 0.0;
    SignChoice tau_argmax{};
    bool violated_linear = false;
    bool violated_nonlinear = false;
    std::optional<double> ell_std;
    std::optional<double> tau_std;
};

inline CriterionReport evaluate_criteria(const ExpectationQuartet& q) {
    CriterionReport rep;
    const LinearMax lm = linear_criterion_max(q);
    const NonlinearMax nm = nonlinear_criterion(q);
    rep.ell = lm.ell;
    rep.ell_argmax_c = lm.c_star;
    rep.tau = nm.tau;
    rep.tau_argmax = nm.best;
    rep.violated_linear = rep.ell > 0.0;
    rep.violated_nonlinear = rep.tau > 0.0;
    return rep;
}

}  // namespace nogo

// oracle.hpp
// Brute-force certifier for joint reality. A quartet of ensembles with a
// mixture weight t admits a joint-reality explanation iff four nonnegative
// joint distributions exist that reproduce the observed <A>, <B> marginals
// and agree, entry by entry, between the two mixtures. That is a 16-variable
// feasibility program solved here by phase-1 simplex, independent of the
// closed-form criteria it cross-checks.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "nogo/criteria.hpp"
#include "nogo/rng.hpp"
#include "nogo/simplex.hpp"

namespace nogo {

// Outcome pairs (alpha, beta) in fixed order (+,+), (+,-), (-,+), (-,-).
inline constexpr std::array<int, 4> kAlpha = {+1, +1, -1, -1};
inline constexpr std::array<int, 4> kBeta = {+1, -1, +1, -1};

// Four joint distributions N(alpha,beta|.)/N, one per ensemble, ordered
// eps_plus, eps_minus, eps_prime_plus, eps_prime_minus.
struct JointRealityModel {
    std::array<std::array<double, 4>, 4> prob{};

    double marginal_a(int ensemble) const {
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += kAlpha[k] * prob[ensemble][k];
        return v;
    }
    double marginal_b(int ensemble) const {
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += kBeta[k] * prob[ensemble][k];
        return v;
    }
    double correlation(int ensemble) const {
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += kAlpha[k] * kBeta[k] * prob[ensemble][k];
        return v;
    }

    // Full re-check of the model invariants, independent of the solver that
    // produced it: nonnegativity, normalization, marginals, and the
    // operational-completeness mixture equality.
    bool consistent_with(const ExpectationQuartet& q, double t, double entry_tol = 1e-9,
                         double moment_tol = 1e-7) const {
        const double exp_a[4] = {q.a_ep, q.a_em, q.a_epp, q.a_epm};
        const double exp_b[4] = {q.b_ep, q.b_em, q.b_epp, q.b_epm};
        for (int e = 0; e < 4; ++e) {
            double sum = 0.0;
            for (int k = 0; k < 4; ++k) {
                if (prob[e][k] < -entry_tol) return false;
                sum += prob[e][k];
            }
            if (std::abs(sum - 1.0) > entry_tol) return false;
            if (std::abs(marginal_a(e) - exp_a[e]) > moment_tol) return false;
            if (std::abs(marginal_b(e) - exp_b[e]) > moment_tol) return false;
        }
        for (int k = 0; k < 4; ++k) {
            const double lhs = t * prob[0][k] + (1.0 - t) * prob[1][k];
            const double rhs = (1.0 - t) * prob[2][k] + t * prob[3][k];
            if (std::abs(lhs - rhs) > moment_tol) return false;
        }
        return true;
    }
};

struct FeasibilityVerdict {
    enum class Status { Feasible, Infeasible, Degenerate };
    Status status = Status::Infeasible;
    double phase1_objective = 0.0;
    std::optional<JointRealityModel> model;

    bool feasible() const { return status == Status::Feasible; }
};

inline constexpr double kFeasibleTol = 1e-9;
inline constexpr double kDegenerateTol = 1e-7;

// Decide whether a joint-reality model exists for the quartet at mixture
// weight t. Residuals between the feasibility and degeneracy thresholds are
// reported as Degenerate rather than forced into a verdict.
inline FeasibilityVerdict check_joint_reality(const ExpectationQuartet& q, double t) {
    const double exp_a[4] = {q.a_ep, q.a_em, q.a_epp, q.a_epm};
    const double exp_b[4] = {q.b_ep, q.b_em, q.b_epp, q.b_epm};
    for (int e = 0; e < 4; ++e) {
        if (std::abs(exp_a[e]) > 1.0 || std::abs(exp_b[e]) > 1.0) {
            throw std::invalid_argument("check_joint_reality: expectation outside [-1, 1]");
        }
    }
    if (!(t > 0.0 && t < 1.0)) {
        throw std::invalid_argument("check_joint_reality: t must lie in (0, 1)");
    }

    // 16 variables: prob[e][k] at index 4e + k.
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int e = 0; e < 4; ++e) {  // normalization
        std::vector<double> row(16, 0.0);
        for (int k = 0; k < 4; ++k) row[4 * e + k] = 1.0;
        a.push_back(row);
        b.push_back(1.0);
    }
    for (int e = 0; e < 4; ++e) {  // marginals
        std::vector<double> ra(16, 0.0), rb(16, 0.0);
        for (int k = 0; k < 4; ++k) {
            ra[4 * e + k] = kAlpha[k];
            rb[4 * e + k] = kBeta[k];
        }
        a.push_back(ra);
        b.push_back(exp_a[e]);
        a.push_back(rb);
        b.push_back(exp_b[e]);
    }
    // Mixture equality on three outcome pairs; normalization makes the
    // fourth redundant and keeping it would create a degenerate row.
    for (int k = 0; k < 3; ++k) {
        std::vector<double> row(16, 0.0);
        row[4 * 0 + k] = t;
        row[4 * 1 + k] = 1.0 - t;
        row[4 * 2 + k] = -(1.0 - t);
        row[4 * 3 + k] = -t;
        a.push_back(row);
        b.push_back(0.0);
    }

    const LpResult lp = solve_equality_lp(a, b, {}, kFeasibleTol);
    FeasibilityVerdict verdict;
    verdict.phase1_objective = lp.phase1_objective;
    if (lp.phase1_objective <= kFeasibleTol) {
        verdict.status = FeasibilityVerdict::Status::Feasible;
        JointRealityModel model;
        for (int e = 0; e < 4; ++e)
            for (int k = 0; k < 4; ++k) model.prob[e][k] = lp.x[4 * e + k];
        verdict.model = model;
    } else if (lp.phase1_objective < kDegenerateTol) {
        verdict.status = FeasibilityVerdict::Status::Degenerate;
    } else {
        verdict.status = FeasibilityVerdict::Status::Infeasible;
    }
    return verdict;
}

struct AbInterval {
    double lower = -1.0;
    double upper = 1.0;
};

// Exact range of <AB> compatible with nonnegative joint counts at the given
// single-observable averages.
inline AbInterval reconstruct_region(double exp_a, double exp_b) {
    if (std::abs(exp_a) > 1.0 || std::abs(exp_b) > 1.0) {
        throw std::invalid_argument("reconstruct_region: expectation outside [-1, 1]");
    }
    AbInterval iv{std::abs(exp_a + exp_b) - 1.0, 1.0 - std::abs(exp_a - exp_b)};
    // degenerate intervals (max(|a|,|b|) = 1) may come out inverted by an ulp
    if (iv.lower > iv.upper + 1e-12) {
        throw std::logic_error("reconstruct_region: empty interval for valid inputs");
    }
    return iv;
}

struct IntersectionInstance {
    ExpectationQuartet quartet;
    double t = 0.5;
};

// Random quartet on the x-z disc whose two segments properly cross, reported
// with the weight at which the mixtures coincide. Configurations are
// canonicalized to the orientation of the ideal family (eps_prime_minus
// counterclockwise-adjacent to eps_plus around the crossing) by mirroring the
// A axis when needed; the mirror only relabels the outcomes of A. Collinear
// segment pairs are rejected.
inline IntersectionInstance random_intersection_instance(StreamRng& rng) {
    auto disc_point = [&rng](double out[2]) {
        for (;;) {
            const double x = 2.0 * rng.uniform() - 1.0;
            const double z = 2.0 * rng.uniform() - 1.0;
            if (x * x + z * z <= 1.0) {
                out[0] = x;
                out[1] = z;
                return;
            }
        }
    };
    for (;;) {
        double ep[2], em[2], epp[2], epm[2];
        disc_point(ep);
        disc_point(em);
        disc_point(epp);
        const double t = 0.1 + 0.8 * rng.uniform();
        for (int i = 0; i < 2; ++i) {
            epm[i] = (t * ep[i] + (1.0 - t) * em[i] - (1.0 - t) * epp[i]) / t;
        }
        if (epm[0] * epm[0] + epm[1] * epm[1] > 1.0) continue;
        const double cross = (ep[0] - em[0]) * (epm[1] - epp[1]) - (ep[1] - em[1]) * (epm[0] - epp[0]);
        if (std::abs(cross) < 1e-9) continue;  // collinear: no unique weight
        if (cross < 0.0) {
            ep[0] = -ep[0];
            em[0] = -em[0];
            epp[0] = -epp[0];
            epm[0] = -epm[0];
        }
        IntersectionInstance inst;
        inst.quartet = {ep[0], ep[1], em[0], em[1], epp[0], epp[1], epm[0], epm[1]};
        inst.t = t;
        return inst;
    }
}

}  // namespace nogo

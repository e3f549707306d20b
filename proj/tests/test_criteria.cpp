#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nogo/criteria.hpp"
#include "nogo/rng.hpp"

using namespace nogo;

namespace {
constexpr double kPi = 3.14159265358979323846;

ExpectationQuartet random_quartet(StreamRng& rng) {
    auto u = [&rng] { return 2.0 * rng.uniform() - 1.0; };
    return {u(), u(), u(), u(), u(), u(), u(), u()};
}

// Brute-force maximization of the linear criterion over a c grid.
double grid_linear_max(const ExpectationQuartet& q, double step = 1e-4) {
    double best = -std::numeric_limits<double>::infinity();
    for (double c = -1.0 + step; c < 1.0; c += step) {
        best = std::max(best, linear_criterion(q, c));
    }
    return best;
}
}  // namespace

TEST_CASE("constraint_region classifies the forced side of <AB>") {
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(constraint_region(s, s, 0.0) == ConstraintRegion::ForcesAbove);
    CHECK(constraint_region(-s, -s, 0.0) == ConstraintRegion::ForcesAbove);
    CHECK(constraint_region(1.0, -1.0, 0.0) == ConstraintRegion::ForcesBelow);
    CHECK(constraint_region(0.0, 0.0, 0.0) == ConstraintRegion::Unconstrained);
    CHECK_THROWS_AS(constraint_region(0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(constraint_region(0.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("linear criterion reaches the known ideal values") {
    const ExpectationQuartet q2 = expectation_quartet(ensemble_quartet(kPi / 2.0), 0.0);
    CHECK_THAT(linear_criterion(q2, 0.0),
               Catch::Matchers::WithinAbs(std::sqrt(2.0) - 1.0, 1e-12));

    const ExpectationQuartet q3 = expectation_quartet(ensemble_quartet(kPi / 3.0), 0.0);
    CHECK_THAT(linear_criterion(q3, 0.0),
               Catch::Matchers::WithinAbs((std::sqrt(7.0) - 2.0) / 2.0, 1e-12));

    const ExpectationQuartet zeros{};
    for (double c : {-0.9, -0.4, 0.0, 0.3, 0.8}) {
        CHECK_THAT(linear_criterion(zeros, c),
                   Catch::Matchers::WithinAbs(-1.0 - std::abs(c), 1e-15));
        CHECK(linear_criterion(zeros, c) < 0.0);
    }
    CHECK_THROWS_AS(linear_criterion(zeros, 1.0), std::invalid_argument);
}

TEST_CASE("linear_criterion_max crosses the envelopes in closed form") {
    StreamRng rng(11);

    SECTION("symmetric dephased family peaks at c = 0") {
        for (int i = 0; i < 50; ++i) {
            const double theta = 0.05 + rng.uniform() * (kPi / 2.0 - 0.05);
            const double mu = rng.uniform();
            const auto q = expectation_quartet(ensemble_quartet(theta), mu);
            const LinearMax lm = linear_criterion_max(q);
            CHECK_THAT(lm.c_star, Catch::Matchers::WithinAbs(0.0, 1e-12));
            CHECK_THAT(lm.ell, Catch::Matchers::WithinAbs(ell_theta_mu(theta, mu), 1e-12));
        }
    }

    SECTION("matches a fine grid search on arbitrary quartets") {
        for (int i = 0; i < 40; ++i) {
            const ExpectationQuartet q = random_quartet(rng);
            const LinearMax lm = linear_criterion_max(q);
            const double grid = grid_linear_max(q);
            CHECK(lm.ell >= grid - 1e-12);      // closed form dominates any grid point
            CHECK(lm.ell <= grid + 1.01e-4);    // and exceeds it by at most one step
            CHECK(lm.c_star > -1.0);
            CHECK(lm.c_star < 1.0);
        }
    }

    SECTION("all-zero expectations") {
        const LinearMax lm = linear_criterion_max(ExpectationQuartet{});
        CHECK(lm.ell == -1.0);
        CHECK(lm.c_star == 0.0);
    }
}

TEST_CASE("nonlinear criterion reaches the known ideal values") {
    const ExpectationQuartet q2 = expectation_quartet(ensemble_quartet(kPi / 2.0), 0.0);
    CHECK_THAT(nonlinear_criterion(q2).tau,
               Catch::Matchers::WithinAbs(8.0 * (std::sqrt(2.0) - 1.0), 1e-12));

    const ExpectationQuartet q3 = expectation_quartet(ensemble_quartet(kPi / 3.0), 0.0);
    CHECK_THAT(nonlinear_criterion(q3).tau,
               Catch::Matchers::WithinAbs(7.0 * (std::sqrt(7.0) - 2.0) / 2.0, 1e-12));

    const ExpectationQuartet zeros{};
    for (const SignChoice& sc : valid_sign_choices()) {
        CHECK_THAT(reality_determinant(zeros, sc), Catch::Matchers::WithinAbs(0.0, 1e-15));
    }
    CHECK_THAT(nonlinear_criterion(zeros).tau, Catch::Matchers::WithinAbs(0.0, 1e-15));
}

TEST_CASE("exactly eight sign choices, all with pqrs = -1") {
    const auto& choices = valid_sign_choices();
    REQUIRE(choices.size() == 8);
    for (const SignChoice& sc : choices) {
        CHECK(sc.p * sc.q * sc.r * sc.s == -1);
    }
}

TEST_CASE("closed-form robustness curves") {
    CHECK_THAT(ell_theta_mu(kPi / 3.0, 0.0),
               Catch::Matchers::WithinAbs((std::sqrt(7.0) - 2.0) / 2.0, 1e-12));
    CHECK_THAT(ell_theta_mu(kPi / 3.0, 3.0 - std::sqrt(7.0)),
               Catch::Matchers::WithinAbs(0.0, 1e-12));

    // direct substitution at mu = 0.2
    const double m_plus = 0.5 * (0.5 + std::sqrt(7.0) / 2.0);
    CHECK_THAT(ell_theta_mu(kPi / 3.0, 0.2),
               Catch::Matchers::WithinAbs((std::sqrt(7.0) - 2.0) / 2.0 - 0.2 * m_plus, 1e-12));
    CHECK_THAT(ell_theta_mu(kPi / 3.0, 0.2), Catch::Matchers::WithinAbs(0.14058809, 1e-8));

    CHECK_THAT(tau_theta_mu(kPi / 3.0, 0.0),
               Catch::Matchers::WithinAbs(7.0 * (std::sqrt(7.0) - 2.0) / 2.0, 1e-12));
    CHECK_THAT(tau_theta_mu(kPi / 3.0, (7.0 - 2.0 * std::sqrt(7.0)) / 3.0),
               Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK(tau_theta_mu(kPi / 3.0, 0.653) < 0.0);

    CHECK_THROWS_AS(ell_theta_mu(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ell_theta_mu(kPi / 3.0, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(tau_theta_mu(2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(tau_theta_mu(kPi / 3.0, -0.2), std::invalid_argument);
}

TEST_CASE("criteria on dephased ensembles match the closed forms") {
    StreamRng rng(12);
    for (int i = 0; i < 200; ++i) {
        const double theta = rng.uniform() * kPi / 2.0;
        const double mu = rng.uniform();
        const auto q = expectation_quartet(ensemble_quartet(theta), mu);
        CHECK_THAT(linear_criterion_max(q).ell,
                   Catch::Matchers::WithinAbs(ell_theta_mu(theta, mu), 1e-9));
        CHECK_THAT(nonlinear_criterion(q).tau,
                   Catch::Matchers::WithinAbs(tau_theta_mu(theta, mu), 1e-9));
    }
}

TEST_CASE("a linear violation implies a nonlinear violation") {
    // uniform draws essentially never violate the linear bound, so half the
    // quartets are perturbations of violating family members
    StreamRng rng(13);
    int linear_violations = 0;
    for (int i = 0; i < 1000; ++i) {
        ExpectationQuartet q;
        if (i % 2 == 0) {
            q = random_quartet(rng);
        } else {
            const double theta = 0.3 + rng.uniform() * (kPi / 2.0 - 0.3);
            q = expectation_quartet(ensemble_quartet(theta), 0.4 * rng.uniform());
            auto jitter = [&rng](double& e) {
                e += 0.3 * (2.0 * rng.uniform() - 1.0);
                e = std::clamp(e, -1.0, 1.0);
            };
            jitter(q.a_ep);
            jitter(q.b_ep);
            jitter(q.a_em);
            jitter(q.b_em);
            jitter(q.a_epp);
            jitter(q.b_epp);
            jitter(q.a_epm);
            jitter(q.b_epm);
        }
        const CriterionReport rep = evaluate_criteria(q);
        CHECK(rep.violated_linear == (rep.ell > 0.0));
        CHECK(rep.violated_nonlinear == (rep.tau > 0.0));
        if (rep.ell > 0.0) {
            ++linear_violations;
            CHECK(rep.tau > 0.0);
        }
    }
    // the draw must actually exercise the implication
    CHECK(linear_violations > 50);
}

TEST_CASE("negating all signs while swapping +/- rows fixes the determinant") {
    StreamRng rng(14);
    for (int i = 0; i < 200; ++i) {
        const ExpectationQuartet q = random_quartet(rng);
        const ExpectationQuartet swapped{q.a_em, q.b_em, q.a_ep, q.b_ep,
                                         q.a_epm, q.b_epm, q.a_epp, q.b_epp};
        for (const SignChoice& sc : valid_sign_choices()) {
            const SignChoice neg{-sc.p, -sc.q, -sc.r, -sc.s};
            CHECK_THAT(reality_determinant(q, sc),
                       Catch::Matchers::WithinAbs(reality_determinant(swapped, neg), 1e-12));
        }
    }
}

TEST_CASE("robustness curves decrease with dephasing strength") {
    StreamRng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const double theta = 0.05 + rng.uniform() * (kPi / 2.0 - 0.05);

        // ell is linear in mu with negative slope everywhere.
        for (double mu = 0.0; mu < 0.99; mu += 0.01) {
            CHECK(ell_theta_mu(theta, mu + 0.01) < ell_theta_mu(theta, mu));
        }

        // tau decreases up to its sign change; past the zero it is a product
        // of factors of opposite sign and eventually turns back toward zero,
        // so the decrease is only asserted on the violation-relevant range.
        const double c = std::cos(theta);
        const double d = std::sqrt(2.0 - c * c);
        const double s2 = std::sin(theta) * std::sin(theta);
        const double tau_zero = s2 > 0.0 ? d * (d - 1.0) / s2 : 1.0;
        const double hi = std::min(1.0, tau_zero);
        for (double mu = 0.0; mu + 0.01 <= hi; mu += 0.01) {
            CHECK(tau_theta_mu(theta, mu + 0.01) < tau_theta_mu(theta, mu));
        }
    }
}

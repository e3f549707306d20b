#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nogo/oracle.hpp"
#include "nogo/rng.hpp"

using namespace nogo;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Least-squares projection of x onto {Ax = b} via the normal equations,
// solved by plain Gaussian elimination (test-local, independent of the
// simplex implementation).
std::vector<double> project_onto_equalities(const std::vector<std::vector<double>>& a,
                                            const std::vector<double>& b,
                                            const std::vector<double>& x) {
    const std::size_t m = a.size();
    const std::size_t n = x.size();
    std::vector<double> residual(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = -b[i];
        for (std::size_t j = 0; j < n; ++j) s += a[i][j] * x[j];
        residual[i] = s;
    }
    // gram = A A^T
    std::vector<std::vector<double>> gram(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a[i][j] * a[k][j];
            gram[i][k] = s;
        }
    }
    // solve gram * y = residual with partial pivoting
    std::vector<double> y = residual;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::abs(gram[r][col]) > std::abs(gram[piv][col])) piv = r;
        }
        std::swap(gram[piv], gram[col]);
        std::swap(y[piv], y[col]);
        if (std::abs(gram[col][col]) < 1e-13) continue;  // redundant constraint
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = gram[r][col] / gram[col][col];
            for (std::size_t j = col; j < m; ++j) gram[r][j] -= f * gram[col][j];
            y[r] -= f * y[col];
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        y[i] = std::abs(gram[i][i]) < 1e-13 ? 0.0 : y[i] / gram[i][i];
    }
    std::vector<double> out = x;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) out[j] -= a[i][j] * y[i];
    }
    return out;
}

// The oracle's equality system, rebuilt independently for the projection test.
void oracle_system(const ExpectationQuartet& q, double t, std::vector<std::vector<double>>& a,
                   std::vector<double>& b) {
    const double exp_a[4] = {q.a_ep, q.a_em, q.a_epp, q.a_epm};
    const double exp_b[4] = {q.b_ep, q.b_em, q.b_epp, q.b_epm};
    a.clear();
    b.clear();
    for (int e = 0; e < 4; ++e) {
        std::vector<double> row(16, 0.0);
        for (int k = 0; k < 4; ++k) row[4 * e + k] = 1.0;
        a.push_back(row);
        b.push_back(1.0);
    }
    for (int e = 0; e < 4; ++e) {
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
    for (int k = 0; k < 3; ++k) {
        std::vector<double> row(16, 0.0);
        row[k] = t;
        row[4 + k] = 1.0 - t;
        row[8 + k] = -(1.0 - t);
        row[12 + k] = -t;
        a.push_back(row);
        b.push_back(0.0);
    }
}

double sum_constraint_violation(const std::vector<std::vector<double>>& a,
                                const std::vector<double>& b, const std::vector<double>& x) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double s = -b[i];
        for (std::size_t j = 0; j < x.size(); ++j) s += a[i][j] * x[j];
        total += std::abs(s);
    }
    return total;
}
}  // namespace

TEST_CASE("reconstruct_region gives the exact <AB> interval") {
    const double s = 1.0 / std::sqrt(2.0);
    const AbInterval iv = reconstruct_region(s, s);
    CHECK_THAT(iv.lower, Catch::Matchers::WithinAbs(std::sqrt(2.0) - 1.0, 1e-12));
    CHECK_THAT(iv.upper, Catch::Matchers::WithinAbs(1.0, 1e-12));

    const AbInterval det = reconstruct_region(1.0, 1.0);
    CHECK(det.lower == 1.0);
    CHECK(det.upper == 1.0);

    const AbInterval full = reconstruct_region(0.0, 0.0);
    CHECK(full.lower == -1.0);
    CHECK(full.upper == 1.0);

    CHECK_THROWS_AS(reconstruct_region(1.2, 0.0), std::invalid_argument);

    StreamRng rng(21);
    for (int i = 0; i < 500; ++i) {
        const double ea = 2.0 * rng.uniform() - 1.0;
        const double eb = 2.0 * rng.uniform() - 1.0;
        const AbInterval r = reconstruct_region(ea, eb);
        CHECK(r.lower <= r.upper);
    }
}

TEST_CASE("check_joint_reality on the ideal family") {
    const EnsembleQuartet family = ensemble_quartet(kPi / 3.0);

    const FeasibilityVerdict sharp = check_joint_reality(expectation_quartet(family, 0.0), family.t);
    CHECK(sharp.status == FeasibilityVerdict::Status::Infeasible);
    CHECK_FALSE(sharp.feasible());
    CHECK_FALSE(sharp.model.has_value());
    CHECK(sharp.phase1_objective > 1e-7);

    const FeasibilityVerdict washed =
        check_joint_reality(expectation_quartet(family, 0.653), family.t);
    CHECK(washed.status == FeasibilityVerdict::Status::Feasible);
    REQUIRE(washed.model.has_value());
    CHECK(washed.model->consistent_with(expectation_quartet(family, 0.653), family.t));
}

TEST_CASE("all-zero quartet is trivially explained") {
    const ExpectationQuartet zeros{};
    const FeasibilityVerdict v = check_joint_reality(zeros, 0.5);
    CHECK(v.feasible());
    CHECK(v.phase1_objective <= 1e-9);
    REQUIRE(v.model.has_value());
    CHECK(v.model->consistent_with(zeros, 0.5));

    // the uniform model is one valid witness of the same instance
    JointRealityModel uniform;
    for (auto& dist : uniform.prob) dist = {0.25, 0.25, 0.25, 0.25};
    CHECK(uniform.consistent_with(zeros, 0.5));
}

TEST_CASE("check_joint_reality validates inputs") {
    ExpectationQuartet bad{};
    bad.a_ep = 1.5;
    CHECK_THROWS_AS(check_joint_reality(bad, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(check_joint_reality(ExpectationQuartet{}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(check_joint_reality(ExpectationQuartet{}, 1.0), std::invalid_argument);
}

TEST_CASE("feasible witnesses satisfy every model invariant") {
    StreamRng rng(22);
    int feasible_seen = 0;
    for (int i = 0; i < 200; ++i) {
        const IntersectionInstance inst = random_intersection_instance(rng);
        const FeasibilityVerdict v = check_joint_reality(inst.quartet, inst.t);
        CHECK((v.model.has_value()) == v.feasible());
        if (v.feasible()) {
            ++feasible_seen;
            CHECK(v.phase1_objective <= 1e-9);
            CHECK(v.model->consistent_with(inst.quartet, inst.t));
        }
    }
    CHECK(feasible_seen > 0);
}

TEST_CASE("interval bound and constraint region agree on a grid") {
    for (double c : {-0.5, 0.0, 0.5}) {
        for (int i = 0; i <= 100; ++i) {
            for (int j = 0; j <= 100; ++j) {
                const double ea = -1.0 + 0.02 * i;
                const double eb = -1.0 + 0.02 * j;
                const AbInterval iv = reconstruct_region(ea, eb);
                const ConstraintRegion region = constraint_region(ea, eb, c);
                CHECK((region == ConstraintRegion::ForcesAbove) == (iv.lower > c));
                CHECK((region == ConstraintRegion::ForcesBelow) == (iv.upper < c));
            }
        }
    }
}

TEST_CASE("witnesses sit on the constraint manifold, not off by solver slop") {
    StreamRng rng(23);
    int checked = 0;
    while (checked < 200) {
        const IntersectionInstance inst = random_intersection_instance(rng);
        const FeasibilityVerdict v = check_joint_reality(inst.quartet, inst.t);
        if (!v.feasible()) continue;
        ++checked;
        std::vector<double> x;
        for (const auto& dist : v.model->prob) x.insert(x.end(), dist.begin(), dist.end());
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        oracle_system(inst.quartet, inst.t, a, b);
        const std::vector<double> projected = project_onto_equalities(a, b, x);
        const double before = sum_constraint_violation(a, b, x);
        const double after = sum_constraint_violation(a, b, projected);
        CHECK(std::abs(before - after) < 1e-9);
    }
}

TEST_CASE("generated instances are proper intersections") {
    StreamRng rng(24);
    for (int i = 0; i < 300; ++i) {
        const IntersectionInstance inst = random_intersection_instance(rng);
        const ExpectationQuartet& q = inst.quartet;
        CHECK(inst.t > 0.0);
        CHECK(inst.t < 1.0);
        for (double e : {q.a_ep, q.b_ep, q.a_em, q.b_em, q.a_epp, q.b_epp, q.a_epm, q.b_epm}) {
            CHECK(std::abs(e) <= 1.0);
        }
        // mixtures coincide at t
        CHECK_THAT(inst.t * q.a_ep + (1.0 - inst.t) * q.a_em,
                   Catch::Matchers::WithinAbs((1.0 - inst.t) * q.a_epp + inst.t * q.a_epm, 1e-9));
        CHECK_THAT(inst.t * q.b_ep + (1.0 - inst.t) * q.b_em,
                   Catch::Matchers::WithinAbs((1.0 - inst.t) * q.b_epp + inst.t * q.b_epm, 1e-9));
        // canonical orientation, never collinear
        const double cross = (q.a_ep - q.a_em) * (q.b_epm - q.b_epp) -
                             (q.b_ep - q.b_em) * (q.a_epm - q.a_epp);
        CHECK(cross > 1e-9);
    }
}

TEST_CASE("criterion sign matches oracle feasibility on intersection instances") {
    StreamRng rng(25);
    int agree = 0, compared = 0, excluded = 0;
    for (int i = 0; i < 300; ++i) {
        const IntersectionInstance inst = random_intersection_instance(rng);
        const double tau = nonlinear_criterion(inst.quartet).tau;
        const FeasibilityVerdict v = check_joint_reality(inst.quartet, inst.t);
        if (std::abs(tau) <= 1e-7 || v.status == FeasibilityVerdict::Status::Degenerate) {
            ++excluded;
            continue;
        }
        ++compared;
        if ((tau > 0.0) == !v.feasible()) ++agree;
    }
    CHECK(agree == compared);
    CHECK(compared >= 290);  // borderline draws should be rare
}

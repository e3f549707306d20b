#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nogo/bloch.hpp"
#include "nogo/rng.hpp"

using namespace nogo;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Closed-form family parameters, derived independently of ensemble_quartet.
struct Family {
    double m_plus, m_minus, delta;
    explicit Family(double theta) {
        const double c = std::cos(theta);
        delta = std::sqrt(2.0 - c * c);
        m_plus = 0.5 * (c + delta);
        m_minus = 0.5 * (c - delta);
    }
};

BlochVector random_ball_vector(StreamRng& rng) {
    for (;;) {
        BlochVector v{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0,
                      2.0 * rng.uniform() - 1.0};
        if (v.norm2() <= 1.0) return v;
    }
}
}  // namespace

TEST_CASE("expectation projects the state onto the measurement axis") {
    CHECK(expectation({0.0, 0.0, 1.0}, Observable::sigma_z()) == 1.0);

    const double s = 1.0 / std::sqrt(2.0);
    CHECK_THAT(expectation({s, 0.0, s}, Observable::sigma_x()),
               Catch::Matchers::WithinAbs(0.70710678, 1e-8));

    // theta = pi/3 family member: <sigma_x> is its x component.
    const Family f(kPi / 3.0);
    const BlochVector eps_plus{-f.m_minus, 0.0, f.m_plus};
    CHECK_THAT(expectation(eps_plus, Observable::sigma_x()),
               Catch::Matchers::WithinAbs(0.41143783, 1e-8));
    CHECK(expectation(eps_plus, Observable::sigma_x()) == -f.m_minus);
}

TEST_CASE("observable axes are exact unit vectors") {
    for (const Observable& obs :
         {Observable::sigma_x(), Observable::sigma_y(), Observable::sigma_z()}) {
        CHECK(obs.axis.norm2() == 1.0);
    }
    CHECK(Observable::sigma_x().label == Observable::Label::A);
    CHECK(Observable::sigma_z().label == Observable::Label::B);
    CHECK(Observable::sigma_y().label == Observable::Label::Y);
}

TEST_CASE("expectation rejects unphysical states") {
    CHECK_THROWS_AS(expectation({1.1, 0.0, 0.0}, Observable::sigma_x()), std::invalid_argument);
    CHECK_THROWS_AS(expectation({0.8, 0.8, 0.8}, Observable::sigma_z()), std::invalid_argument);
}

TEST_CASE("dephase shrinks the equatorial plane") {
    const BlochVector gone = dephase({1.0, 0.0, 0.0}, 1.0);
    CHECK(gone.x == 0.0);
    CHECK(gone.y == 0.0);
    CHECK(gone.z == 0.0);

    const BlochVector same = dephase({0.3, 0.4, 0.5}, 0.0);
    CHECK(same.x == 0.3);
    CHECK(same.y == 0.4);
    CHECK(same.z == 0.5);

    const double s = 1.0 / std::sqrt(2.0);
    const BlochVector half = dephase({s, 0.0, s}, 0.5);
    CHECK_THAT(half.x, Catch::Matchers::WithinAbs(0.35355339, 1e-8));
    CHECK(half.y == 0.0);
    CHECK_THAT(half.z, Catch::Matchers::WithinAbs(0.70710678, 1e-8));

    CHECK_THROWS_AS(dephase({0.0, 0.0, 1.0}, -0.01), std::invalid_argument);
    CHECK_THROWS_AS(dephase({0.0, 0.0, 1.0}, 1.01), std::invalid_argument);
}

TEST_CASE("dephase is contractive, z-invariant, and a semigroup in the shrink factor") {
    StreamRng rng(101);
    for (int i = 0; i < 500; ++i) {
        const BlochVector v = random_ball_vector(rng);
        const double mu1 = rng.uniform();
        const double mu2 = rng.uniform();

        const BlochVector d1 = dephase(v, mu1);
        CHECK(d1.norm() <= v.norm() + 1e-15);
        CHECK(d1.z == v.z);

        const BlochVector lhs = dephase(d1, mu2);
        const BlochVector rhs = dephase(v, 1.0 - (1.0 - mu1) * (1.0 - mu2));
        CHECK_THAT(lhs.x, Catch::Matchers::WithinAbs(rhs.x, 1e-12));
        CHECK_THAT(lhs.y, Catch::Matchers::WithinAbs(rhs.y, 1e-12));
        CHECK(lhs.z == rhs.z);
    }
}

TEST_CASE("rotate: identity, pole inversion, norm preservation") {
    const BlochVector id = rotate({0.0, 0.0, 1.0}, 0.0, 12.34);
    CHECK(id.x == 0.0);
    CHECK(id.y == 0.0);
    CHECK(id.z == 1.0);

    const BlochVector flipped = rotate({0.0, 0.0, 1.0}, kPi, kPi / 2.0);
    CHECK_THAT(flipped.x, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(flipped.y, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(flipped.z, Catch::Matchers::WithinAbs(-1.0, 1e-12));

    StreamRng rng(202);
    for (int i = 0; i < 1000; ++i) {
        const BlochVector v = random_ball_vector(rng);
        const double big_theta = 2.0 * kPi * rng.uniform();
        const double phi = 2.0 * kPi * rng.uniform();
        CHECK_THAT(rotate(v, big_theta, phi).norm(), Catch::Matchers::WithinAbs(v.norm(), 1e-9));
    }
}

TEST_CASE("rotate about the y axis tilts the pole by the rotation angle") {
    const double big_theta = 0.134967 * kPi;
    const BlochVector v = rotate({0.0, 0.0, 1.0}, big_theta, kPi / 2.0);
    CHECK_THAT(v.x, Catch::Matchers::WithinAbs(std::sin(big_theta), 1e-12));
    CHECK_THAT(v.y, Catch::Matchers::WithinAbs(0.0, 1e-12));
    CHECK_THAT(v.z, Catch::Matchers::WithinAbs(std::cos(big_theta), 1e-12));
}

TEST_CASE("preparation pulse table reproduces the theta = pi/3 quartet") {
    // The four gate settings used to prepare the ensembles, as rotations of
    // the pole state. The quoted pulse angle 0.134967*pi sits 2e-5 rad away
    // from acos(m_plus), so the correspondence is documentation-grade: the
    // closed-form family is the ground truth here.
    const EnsembleQuartet q = ensemble_quartet(kPi / 3.0);
    const BlochVector pole{0.0, 0.0, 1.0};
    struct Pulse {
        double big_theta, phi;
        BlochVector target;
    };
    const Pulse pulses[4] = {
        {0.134967 * kPi, kPi / 2.0, q.eps_plus},
        {0.634967 * kPi, 3.0 * kPi / 2.0, q.eps_minus},
        {0.634967 * kPi, kPi / 2.0, q.eps_prime_plus},
        {0.134967 * kPi, 3.0 * kPi / 2.0, q.eps_prime_minus},
    };
    for (const Pulse& p : pulses) {
        const BlochVector got = rotate(pole, p.big_theta, p.phi);
        CHECK_THAT(got.x, Catch::Matchers::WithinAbs(p.target.x, 1e-4));
        CHECK_THAT(got.y, Catch::Matchers::WithinAbs(p.target.y, 1e-4));
        CHECK_THAT(got.z, Catch::Matchers::WithinAbs(p.target.z, 1e-4));
    }
}

TEST_CASE("ensemble_quartet at theta = pi/3") {
    const EnsembleQuartet q = ensemble_quartet(kPi / 3.0);
    const Family f(kPi / 3.0);

    CHECK_THAT(q.eps_plus.x, Catch::Matchers::WithinAbs(0.41143783, 1e-8));
    CHECK_THAT(q.eps_plus.z, Catch::Matchers::WithinAbs(0.91143783, 1e-8));
    CHECK_THAT(q.eps_minus.x, Catch::Matchers::WithinAbs(-0.91143783, 1e-8));
    CHECK_THAT(q.eps_minus.z, Catch::Matchers::WithinAbs(-0.41143783, 1e-8));
    CHECK_THAT(q.eps_prime_plus.x, Catch::Matchers::WithinAbs(0.91143783, 1e-8));
    CHECK_THAT(q.eps_prime_plus.z, Catch::Matchers::WithinAbs(-0.41143783, 1e-8));
    CHECK_THAT(q.eps_prime_minus.x, Catch::Matchers::WithinAbs(-0.41143783, 1e-8));
    CHECK_THAT(q.eps_prime_minus.z, Catch::Matchers::WithinAbs(0.91143783, 1e-8));

    CHECK(q.eps_plus.y == 0.0);
    CHECK(q.eps_minus.y == 0.0);
    CHECK(q.eps_prime_plus.y == 0.0);
    CHECK(q.eps_prime_minus.y == 0.0);

    CHECK_THAT(q.eps_plus.x, Catch::Matchers::WithinAbs(-f.m_minus, 1e-15));
    CHECK_THAT(q.eps_plus.z, Catch::Matchers::WithinAbs(f.m_plus, 1e-15));

    CHECK_THAT(q.t, Catch::Matchers::WithinAbs(0.68898, 1e-5));
    CHECK_THAT(q.t, Catch::Matchers::WithinAbs((std::sqrt(7.0) + 1.0) / (2.0 * std::sqrt(7.0)),
                                               1e-12));
}

TEST_CASE("ensemble_quartet at theta = pi/2") {
    const EnsembleQuartet q = ensemble_quartet(kPi / 2.0);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK_THAT(q.eps_plus.x, Catch::Matchers::WithinAbs(s, 1e-12));
    CHECK_THAT(q.eps_plus.z, Catch::Matchers::WithinAbs(s, 1e-12));
    CHECK_THAT(q.eps_minus.x, Catch::Matchers::WithinAbs(-s, 1e-12));
    CHECK_THAT(q.eps_minus.z, Catch::Matchers::WithinAbs(-s, 1e-12));
    CHECK_THAT(q.eps_prime_plus.x, Catch::Matchers::WithinAbs(s, 1e-12));
    CHECK_THAT(q.eps_prime_plus.z, Catch::Matchers::WithinAbs(-s, 1e-12));
    CHECK_THAT(q.eps_prime_minus.x, Catch::Matchers::WithinAbs(-s, 1e-12));
    CHECK_THAT(q.eps_prime_minus.z, Catch::Matchers::WithinAbs(s, 1e-12));
    CHECK_THAT(q.t, Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("ensemble_quartet rejects angles outside [0, pi/2]") {
    CHECK_THROWS_AS(ensemble_quartet(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(ensemble_quartet(kPi / 2.0 + 0.1), std::invalid_argument);
}

TEST_CASE("pure-family identity: all quartet vectors are unit vectors") {
    StreamRng rng(303);
    for (int i = 0; i < 200; ++i) {
        const double theta = rng.uniform() * kPi / 2.0;
        const EnsembleQuartet q = ensemble_quartet(theta);
        for (const BlochVector* v :
             {&q.eps_plus, &q.eps_minus, &q.eps_prime_plus, &q.eps_prime_minus}) {
            CHECK_THAT(v->norm2(), Catch::Matchers::WithinAbs(1.0, 1e-12));
        }
        // m_plus^2 + m_minus^2 = 1 is the same statement through the family.
        const Family f(theta);
        CHECK_THAT(f.m_plus * f.m_plus + f.m_minus * f.m_minus,
                   Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("the two quartet mixtures coincide at weight t") {
    StreamRng rng(404);
    for (int i = 0; i < 200; ++i) {
        const double theta = 0.01 + rng.uniform() * (kPi / 2.0 - 0.01);
        const EnsembleQuartet q = ensemble_quartet(theta);
        const BlochVector lhs = q.t * q.eps_plus + (1.0 - q.t) * q.eps_minus;
        const BlochVector rhs = (1.0 - q.t) * q.eps_prime_plus + q.t * q.eps_prime_minus;
        CHECK_THAT(lhs.x, Catch::Matchers::WithinAbs(rhs.x, 1e-9));
        CHECK_THAT(lhs.y, Catch::Matchers::WithinAbs(rhs.y, 1e-9));
        CHECK_THAT(lhs.z, Catch::Matchers::WithinAbs(rhs.z, 1e-9));
        const BlochVector mid = q.intersection();
        CHECK_THAT(mid.x, Catch::Matchers::WithinAbs(lhs.x, 1e-15));
    }
}

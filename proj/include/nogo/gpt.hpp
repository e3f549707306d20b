// gpt.hpp
// Device-independent data analysis: fit raw frequencies to primary states,
// then build secondary preparations as convex mixtures of the six primaries
// that satisfy operational equivalence exactly while staying as close to
// their own primaries as possible (similarity maximization).

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nogo/criteria.hpp"
#include "nogo/sampler.hpp"
#include "nogo/simplex.hpp"

namespace nogo {

enum class Provenance { Raw, Primary, Secondary };

// A preparation described only by its outcome statistics: p(+1) under the
// three primary measurements, ordered sigma_x, sigma_y, sigma_z.
struct GptState {
    std::array<double, 3> p{0.5, 0.5, 0.5};
    Provenance provenance = Provenance::Raw;

    BlochVector implied_bloch() const {
        return {2.0 * p[0] - 1.0, 2.0 * p[1] - 1.0, 2.0 * p[2] - 1.0};
    }

    static GptState from_bloch(const BlochVector& n, Provenance prov) {
        return {{0.5 * (1.0 + n.x), 0.5 * (1.0 + n.y), 0.5 * (1.0 + n.z)}, prov};
    }
};

// Outcome probabilities of an exactly known preparation after dephasing.
inline GptState ideal_state(const BlochVector& n, double mu, Provenance prov) {
    return GptState::from_bloch(dephase(n, mu), prov);
}

enum class FitMode { Qubit, GptRank };

struct PrimaryFit {
    std::array<GptState, kNumPurePreparations> states{};
    std::array<double, kNumPurePreparations> distance{};  // euclidean, probability space
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when no mixture of the primaries can satisfy operational
// equivalence at any candidate weight; signals pathological primaries.
struct EquivalenceInfeasible : FitError {
    using FitError::FitError;
};

namespace detail {

// Inverse-variance weights from Laplace-smoothed binomial cells.
inline std::array<double, 3> cell_weights(const std::array<double, 3>& p,
                                          const std::array<long, 3>& n) {
    std::array<double, 3> w{};
    for (int j = 0; j < 3; ++j) {
        const double nn = static_cast<double>(n[j]);
        const double ps = (p[j] * nn + 1.0) / (nn + 2.0);
        w[j] = nn / (ps * (1.0 - ps));
    }
    return w;
}

// Weighted projection of the implied vector onto the unit ball:
// min sum w_j (u_j - v_j)^2 with |u| <= 1. The KKT solution is
// u_j = w_j v_j / (w_j + lambda), lambda >= 0 found by bisection.
inline std::array<double, 3> project_unit_ball(const std::array<double, 3>& v,
                                               const std::array<double, 3>& w) {
    double norm2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (norm2 <= 1.0) return v;
    double lo = 0.0, hi = 1.0;
    auto norm_at = [&](double lambda) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) {
            const double u = w[j] * v[j] / (w[j] + lambda);
            s += u * u;
        }
        return s;
    };
    while (norm_at(hi) > 1.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (norm_at(mid) > 1.0 ? lo : hi) = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    std::array<double, 3> u{};
    for (int j = 0; j < 3; ++j) u[j] = w[j] * v[j] / (w[j] + lambda);
    return u;
}

// In-place Gaussian elimination with partial pivoting; returns false for a
// singular system.
template <int N>
inline bool solve_linear(double a[N][N], double b[N]) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (std::abs(a[piv][col]) < 1e-14) return false;
        if (piv != col) {
            for (int j = 0; j < N; ++j) std::swap(a[piv][j], a[col][j]);
            std::swap(b[piv], b[col]);
        }
        for (int r = 0; r < N; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int j = col; j < N; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    for (int i = 0; i < N; ++i) b[i] /= a[i][i];
    return true;
}

// Rank-constrained fit of the 6x3 probability matrix: Q ~ ones*alpha' + V*E'
// (one affine component plus three state dimensions, i.e. GPT rank four),
// by alternating least squares. With three binary measurements the model
// interpolates, so the fit converges onto the data and only the [0,1] box
// clamp can bind; the rank bound itself bites only with more measurements
// than state dimensions.
inline std::array<std::array<double, 3>, kNumPurePreparations> rank_fit(
    const std::array<std::array<double, 3>, kNumPurePreparations>& q) {
    constexpr int kP = kNumPurePreparations;
    double v[kP][3];
    double alpha[3] = {0.5, 0.5, 0.5};
    double eff[3][3] = {{0.5, 0.0, 0.0}, {0.0, 0.5, 0.0}, {0.0, 0.0, 0.5}};
    for (int p = 0; p < kP; ++p) {
        for (int j = 0; j < 3; ++j) v[p][j] = 2.0 * q[p][j] - 1.0;
    }

    auto residual = [&] {
        double worst = 0.0;
        for (int p = 0; p < kP; ++p) {
            for (int j = 0; j < 3; ++j) {
                double m = alpha[j];
                for (int k = 0; k < 3; ++k) m += v[p][k] * eff[j][k];
                worst = std::max(worst, std::abs(m - q[p][j]));
            }
        }
        return worst;
    };

    for (int it = 0; it < 64 && residual() > 1e-13; ++it) {
        // States given effects: one exact 3x3 solve per preparation.
        for (int p = 0; p < kP; ++p) {
            double a[3][3], b[3];
            for (int j = 0; j < 3; ++j) {
                for (int k = 0; k < 3; ++k) a[j][k] = eff[j][k];
                b[j] = q[p][j] - alpha[j];
            }
            if (solve_linear<3>(a, b)) {
                for (int k = 0; k < 3; ++k) v[p][k] = b[k];
            }
        }
        // Effects given states: per measurement, least squares over the six
        // preparations for (alpha_j, e_j) via 4x4 normal equations.
        for (int j = 0; j < 3; ++j) {
            double xtx[4][4] = {};
            double xty[4] = {};
            for (int p = 0; p < kP; ++p) {
                const double row[4] = {1.0, v[p][0], v[p][1], v[p][2]};
                for (int r = 0; r < 4; ++r) {
                    for (int c = 0; c < 4; ++c) xtx[r][c] += row[r] * row[c];
                    xty[r] += row[r] * q[p][j];
                }
            }
            if (solve_linear<4>(xtx, xty)) {
                alpha[j] = xty[0];
                for (int k = 0; k < 3; ++k) eff[j][k] = xty[k + 1];
            }
        }
    }

    std::array<std::array<double, 3>, kP> model{};
    for (int p = 0; p < kP; ++p) {
        for (int j = 0; j < 3; ++j) {
            double m = alpha[j];
            for (int k = 0; k < 3; ++k) m += v[p][k] * eff[j][k];
            model[p][j] = std::min(1.0, std::max(0.0, m));
        }
    }
    return model;
}

}  // namespace detail

// Closest states to the raw table satisfying the chosen consistency
// constraint. Qubit mode bounds the implied vector by the unit ball; rank
// mode keeps only the GPT rank/box constraints. Raw tables that already
// satisfy the constraint pass through unchanged.
inline PrimaryFit fit_primaries(const FrequencyTable& table, const AnalysisOptions& opts,
                                FitMode mode = FitMode::Qubit) {
    std::array<std::array<double, 3>, kNumPurePreparations> raw{};
    std::array<std::array<long, 3>, kNumPurePreparations> trials{};
    for (int pi = 0; pi < kNumPurePreparations; ++pi) {
        for (int mi = 0; mi < kNumMeasurements; ++mi) {
            const long n = table.trials[pi][mi];
            if (n <= 0) {
                throw FitError(std::string("fit_primaries: no trials for ") +
                               label(static_cast<Preparation>(pi)) + " / " +
                               label(static_cast<Measurement>(mi)));
            }
            raw[pi][mi] = opts.corrected(table.frequency(
                static_cast<Preparation>(pi), static_cast<Measurement>(mi), +1));
            trials[pi][mi] = n;
        }
    }

    PrimaryFit fit;
    if (mode == FitMode::GptRank) {
        const auto model = detail::rank_fit(raw);
        for (int pi = 0; pi < kNumPurePreparations; ++pi) {
            fit.states[pi] = {model[pi], Provenance::Primary};
            double d2 = 0.0;
            for (int j = 0; j < 3; ++j) d2 += (model[pi][j] - raw[pi][j]) * (model[pi][j] - raw[pi][j]);
            fit.distance[pi] = std::sqrt(d2);
        }
        return fit;
    }

    for (int pi = 0; pi < kNumPurePreparations; ++pi) {
        const std::array<double, 3> v{2.0 * raw[pi][0] - 1.0, 2.0 * raw[pi][1] - 1.0,
                                      2.0 * raw[pi][2] - 1.0};
        GptState s;
        s.provenance = Provenance::Primary;
        if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= 1.0) {
            s.p = raw[pi];  // feasible point: the projection is the identity, exactly
            fit.states[pi] = s;
            fit.distance[pi] = 0.0;
            continue;
        }
        const auto w = detail::cell_weights(raw[pi], trials[pi]);
        const auto u = detail::project_unit_ball(v, w);
        double d2 = 0.0;
        for (int j = 0; j < 3; ++j) {
            s.p[j] = 0.5 * (1.0 + u[j]);
            d2 += (s.p[j] - raw[pi][j]) * (s.p[j] - raw[pi][j]);
        }
        fit.states[pi] = s;
        fit.distance[pi] = std::sqrt(d2);
    }
    return fit;
}

// Max-norm violation of operational equivalence between the two mixtures of
// four states at weight t.
inline double equivalence_residual(std::span<const GptState, 4> states, double t) {
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) {
        const double lhs = t * states[0].p[j] + (1.0 - t) * states[1].p[j];
        const double rhs = (1.0 - t) * states[2].p[j] + t * states[3].p[j];
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

inline double equivalence_residual(const std::array<GptState, 4>& states, double t) {
    return equivalence_residual(std::span<const GptState, 4>(states), t);
}

struct SecondaryAssignment {
    std::array<std::array<double, kNumPurePreparations>, 4> weights{};
    std::array<GptState, 4> secondaries{};
    double t_star = 0.5;
    double similarity = 0.0;

    double own_weight(int i) const { return weights[i][i]; }
};

namespace detail {

// Similarity-maximizing mixture weights at one fixed t; nullopt if the
// equivalence constraints cannot be met.
inline std::optional<SecondaryAssignment> secondaries_at(
    const std::array<GptState, kNumPurePreparations>& primaries, double t) {
    constexpr int kVars = 4 * kNumPurePreparations;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int i = 0; i < 4; ++i) {  // each weight row is a distribution
        std::vector<double> row(kVars, 0.0);
        for (int k = 0; k < kNumPurePreparations; ++k) row[i * kNumPurePreparations + k] = 1.0;
        a.push_back(row);
        b.push_back(1.0);
    }
    const double coef[4] = {t, 1.0 - t, -(1.0 - t), -t};
    for (int j = 0; j < 3; ++j) {  // equivalence, component-wise
        std::vector<double> row(kVars, 0.0);
        for (int i = 0; i < 4; ++i) {
            for (int k = 0; k < kNumPurePreparations; ++k) {
                row[i * kNumPurePreparations + k] = coef[i] * primaries[k].p[j];
            }
        }
        a.push_back(row);
        b.push_back(0.0);
    }
    std::vector<double> cost(kVars, 0.0);
    for (int i = 0; i < 4; ++i) cost[i * kNumPurePreparations + i] = -1.0;

    const LpResult lp = solve_equality_lp(a, b, cost, 1e-9);
    if (lp.status != LpResult::Status::Optimal) return std::nullopt;

    SecondaryAssignment out;
    out.t_star = t;
    out.similarity = -lp.objective / 4.0;
    for (int i = 0; i < 4; ++i) {
        GptState s;
        s.provenance = Provenance::Secondary;
        s.p = {0.0, 0.0, 0.0};
        for (int k = 0; k < kNumPurePreparations; ++k) {
            double w = lp.x[i * kNumPurePreparations + k];
            if (w < 0.0 && w > -1e-9) w = 0.0;  // solver-tolerance dust
            out.weights[i][k] = w;
            for (int j = 0; j < 3; ++j) s.p[j] += w * primaries[k].p[j];
        }
        out.secondaries[i] = s;
    }
    return out;
}

}  // namespace detail

// Pick the mixture weight and weight matrix maximizing similarity. With
// scan = false only t_center is tried; otherwise t runs over a grid of step
// 1e-3 within +-0.05 of t_center (the equivalence constraint is bilinear in
// (t, w), so scanning t restores linearity per candidate).
inline SecondaryAssignment find_secondaries(
    const std::array<GptState, kNumPurePreparations>& primaries, double t_center,
    bool scan = true) {
    if (!(t_center > 0.0 && t_center < 1.0)) {
        throw std::invalid_argument("find_secondaries: t_center must lie in (0, 1)");
    }
    constexpr double kStep = 1e-3;
    constexpr int kHalf = 50;
    std::optional<SecondaryAssignment> best;
    const int lo = scan ? -kHalf : 0;
    const int hi = scan ? kHalf : 0;
    for (int k = lo; k <= hi; ++k) {
        const double t = t_center + k * kStep;
        if (!(t > 1e-6 && t < 1.0 - 1e-6)) continue;
        auto cand = detail::secondaries_at(primaries, t);
        if (cand && (!best || cand->similarity > best->similarity)) best = cand;
    }
    if (!best) {
        throw EquivalenceInfeasible("find_secondaries: no operationally equivalent mixture exists");
    }
    return *best;
}

// Expectations <A> = <sigma_x>, <B> = <sigma_z> of four states; sigma_y is
// calibration-only and dropped.
inline ExpectationQuartet criteria_from_states(const std::array<GptState, 4>& states) {
    auto e = [](const GptState& s, int j) { return 2.0 * s.p[j] - 1.0; };
    ExpectationQuartet q;
    q.a_ep = e(states[0], 0);
    q.b_ep = e(states[0], 2);
    q.a_em = e(states[1], 0);
    q.b_em = e(states[1], 2);
    q.a_epp = e(states[2], 0);
    q.b_epp = e(states[2], 2);
    q.a_epm = e(states[3], 0);
    q.b_epm = e(states[3], 2);
    return q;
}

}  // namespace nogo

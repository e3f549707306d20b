// sampler.hpp
// Finite-statistics simulation of the measurement protocol: seeded Born-rule
// sampling with classical readout flips, frequency tables with CSV
// serialization, readout inversion, and bootstrap error bars.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "nogo/bloch.hpp"
#include "nogo/criteria.hpp"
#include "nogo/rng.hpp"

namespace nogo {

// Detection-error rates: err_up is the chance of reading -1 for a true +1,
// err_down the reverse. mu is the dephasing applied before measurement.
struct NoiseConfig {
    double err_up = 0.0208;
    double err_down = 0.0171;
    double mu = 0.0;

    void validate() const {
        if (!(err_up >= 0.0 && err_up <= 1.0) || !(err_down >= 0.0 && err_down <= 1.0)) {
            throw std::invalid_argument("NoiseConfig: error rates must lie in [0, 1]");
        }
        if (!(mu >= 0.0 && mu <= 1.0)) {
            throw std::invalid_argument("NoiseConfig: mu must lie in [0, 1]");
        }
    }

    static NoiseConfig noiseless() { return {0.0, 0.0, 0.0}; }
};

enum class Preparation : int {
    EpsPlus = 0,
    EpsMinus,
    EpsPrimePlus,
    EpsPrimeMinus,
    YPlus,
    YMinus,
    MixEps,
    MixEpsPrime,
};
inline constexpr int kNumPreparations = 8;
inline constexpr int kNumPurePreparations = 6;

enum class Measurement : int { SigmaX = 0, SigmaY, SigmaZ };
inline constexpr int kNumMeasurements = 3;

inline const char* label(Preparation p) {
    switch (p) {
        case Preparation::EpsPlus: return "eps_plus";
        case Preparation::EpsMinus: return "eps_minus";
        case Preparation::EpsPrimePlus: return "eps_prime_plus";
        case Preparation::EpsPrimeMinus: return "eps_prime_minus";
        case Preparation::YPlus: return "y_plus";
        case Preparation::YMinus: return "y_minus";
        case Preparation::MixEps: return "mix_eps";
        case Preparation::MixEpsPrime: return "mix_eps_prime";
    }
    return "?";
}

inline const char* label(Measurement m) {
    switch (m) {
        case Measurement::SigmaX: return "sigma_x";
        case Measurement::SigmaY: return "sigma_y";
        case Measurement::SigmaZ: return "sigma_z";
    }
    return "?";
}

inline std::optional<Preparation> parse_preparation(const std::string& s) {
    for (int i = 0; i < kNumPreparations; ++i) {
        if (s == label(static_cast<Preparation>(i))) return static_cast<Preparation>(i);
    }
    return std::nullopt;
}

inline std::optional<Measurement> parse_measurement(const std::string& s) {
    for (int i = 0; i < kNumMeasurements; ++i) {
        if (s == label(static_cast<Measurement>(i))) return static_cast<Measurement>(i);
    }
    return std::nullopt;
}

inline Observable observable_of(Measurement m) {
    switch (m) {
        case Measurement::SigmaX: return Observable::sigma_x();
        case Measurement::SigmaY: return Observable::sigma_y();
        case Measurement::SigmaZ: return Observable::sigma_z();
    }
    return Observable::sigma_z();
}

// CSV parse failure, carrying the 1-based row and column of the offence.
struct CsvError : std::runtime_error {
    int row;
    int column;
    CsvError(int row_, int column_, const std::string& what_)
        : std::runtime_error("csv row " + std::to_string(row_) + ", column " +
                             std::to_string(column_) + ": " + what_),
          row(row_),
          column(column_) {}
};

// Relative-frequency record: counts of +1 outcomes and trials per
// (preparation, measurement) cell.
struct FrequencyTable {
    std::array<std::array<long, kNumMeasurements>, kNumPreparations> plus_counts{};
    std::array<std::array<long, kNumMeasurements>, kNumPreparations> trials{};

    long plus(Preparation p, Measurement m) const {
        return plus_counts[static_cast<int>(p)][static_cast<int>(m)];
    }
    long n(Preparation p, Measurement m) const {
        return trials[static_cast<int>(p)][static_cast<int>(m)];
    }
    void record(Preparation p, Measurement m, long plus_count, long trial_count) {
        plus_counts[static_cast<int>(p)][static_cast<int>(m)] = plus_count;
        trials[static_cast<int>(p)][static_cast<int>(m)] = trial_count;
    }

    // p(outcome | measurement, preparation)
    double frequency(Preparation p, Measurement m, int outcome) const {
        const long nn = n(p, m);
        if (nn <= 0) throw std::domain_error("FrequencyTable: cell has zero trials");
        const double fp = static_cast<double>(plus(p, m)) / static_cast<double>(nn);
        return outcome > 0 ? fp : 1.0 - fp;
    }

    bool operator==(const FrequencyTable&) const = default;

    // Fixed header, rows sorted lexicographically by
    // (preparation, measurement, outcome); cells without trials are omitted.
    void write_csv(std::ostream& os) const {
        os << "preparation,measurement,outcome,count,trials\n";
        std::array<int, kNumPreparations> prep_order{};
        for (int i = 0; i < kNumPreparations; ++i) prep_order[i] = i;
        std::sort(prep_order.begin(), prep_order.end(), [](int a, int b) {
            return std::string(label(static_cast<Preparation>(a))) <
                   std::string(label(static_cast<Preparation>(b)));
        });
        for (int pi : prep_order) {
            const auto p = static_cast<Preparation>(pi);
            for (int mi = 0; mi < kNumMeasurements; ++mi) {
                const auto m = static_cast<Measurement>(mi);
                if (n(p, m) <= 0) continue;
                // '+1' sorts before '-1'
                os << label(p) << ',' << label(m) << ",+1," << plus(p, m) << ',' << n(p, m)
                   << '\n';
                os << label(p) << ',' << label(m) << ",-1," << (n(p, m) - plus(p, m)) << ','
                   << n(p, m) << '\n';
            }
        }
    }

    static FrequencyTable read_csv(std::istream& is) {
        FrequencyTable table;
        std::array<std::array<long, kNumMeasurements>, kNumPreparations> minus_counts{};
        std::array<std::array<bool, kNumMeasurements>, kNumPreparations> seen_plus{};
        std::array<std::array<bool, kNumMeasurements>, kNumPreparations> seen_minus{};

        std::string line;
        if (!std::getline(is, line)) throw CsvError(1, 1, "empty input");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line != "preparation,measurement,outcome,count,trials") {
            throw CsvError(1, 1, "unexpected header '" + line + "'");
        }
        int row = 1;
        while (std::getline(is, line)) {
            ++row;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::array<std::string, 5> field;
            std::size_t pos = 0;
            for (int f = 0; f < 5; ++f) {
                if (f == 4) {
                    field[f] = line.substr(pos);
                } else {
                    const std::size_t comma = line.find(',', pos);
                    if (comma == std::string::npos) {
                        throw CsvError(row, f + 1, "expected 5 comma-separated fields");
                    }
                    field[f] = line.substr(pos, comma - pos);
                    pos = comma + 1;
                }
            }
            const auto prep = parse_preparation(field[0]);
            if (!prep) throw CsvError(row, 1, "unknown preparation '" + field[0] + "'");
            const auto meas = parse_measurement(field[1]);
            if (!meas) throw CsvError(row, 2, "unknown measurement '" + field[1] + "'");
            int outcome;
            if (field[2] == "+1") {
                outcome = +1;
            } else if (field[2] == "-1") {
                outcome = -1;
            } else {
                throw CsvError(row, 3, "outcome must be +1 or -1");
            }
            auto parse_long = [&](const std::string& s, int col) {
                try {
                    std::size_t used = 0;
                    const long v = std::stol(s, &used);
                    if (used != s.size()) throw std::invalid_argument("trailing characters");
                    return v;
                } catch (const std::exception&) {
                    throw CsvError(row, col, "'" + s + "' is not an integer");
                }
            };
            const long count = parse_long(field[3], 4);
            const long trial_count = parse_long(field[4], 5);
            if (count < 0 || trial_count <= 0 || count > trial_count) {
                throw CsvError(row, 4, "counts must satisfy 0 <= count <= trials");
            }
            const int pi = static_cast<int>(*prep);
            const int mi = static_cast<int>(*meas);
            if (table.trials[pi][mi] != 0 && table.trials[pi][mi] != trial_count) {
                throw CsvError(row, 5, "conflicting trial counts for one cell");
            }
            table.trials[pi][mi] = trial_count;
            auto& seen = outcome > 0 ? seen_plus : seen_minus;
            if (seen[pi][mi]) throw CsvError(row, 3, "duplicate outcome row for one cell");
            seen[pi][mi] = true;
            if (outcome > 0) {
                table.plus_counts[pi][mi] = count;
            } else {
                minus_counts[pi][mi] = count;
            }
        }
        for (int pi = 0; pi < kNumPreparations; ++pi) {
            for (int mi = 0; mi < kNumMeasurements; ++mi) {
                if (table.trials[pi][mi] == 0) continue;
                if (!seen_plus[pi][mi] || !seen_minus[pi][mi]) {
                    throw CsvError(row, 3, "cell is missing one of its outcome rows");
                }
                if (table.plus_counts[pi][mi] + minus_counts[pi][mi] != table.trials[pi][mi]) {
                    throw CsvError(row, 4, "outcome counts do not sum to trials");
                }
            }
        }
        return table;
    }
};

// Shot allocation: the mixture rows pool shots_plus trials of the heavier arm
// with shots_minus of the lighter, realizing weight n+/(n+ + n-).
struct ShotPlan {
    long shots_plus = 6890;
    long shots_minus = 3110;
    long shots_y = 10000;

    double mixture_weight() const {
        return static_cast<double>(shots_plus) / static_cast<double>(shots_plus + shots_minus);
    }

    long shots_for(Preparation p) const {
        switch (p) {
            case Preparation::EpsPlus:
            case Preparation::EpsPrimeMinus: return shots_plus;
            case Preparation::EpsMinus:
            case Preparation::EpsPrimePlus: return shots_minus;
            case Preparation::YPlus:
            case Preparation::YMinus: return shots_y;
            default: return shots_plus + shots_minus;
        }
    }

    static ShotPlan from_weight(double t, long total, long shots_y = 10000) {
        if (!(t > 0.0 && t < 1.0) || total < 2) {
            throw std::invalid_argument("ShotPlan: need t in (0,1) and total >= 2");
        }
        ShotPlan plan;
        plan.shots_plus = std::lround(t * static_cast<double>(total));
        plan.shots_minus = total - plan.shots_plus;
        plan.shots_y = shots_y;
        return plan;
    }

    void validate() const {
        if (shots_plus <= 0 || shots_minus <= 0 || shots_y <= 0) {
            throw std::invalid_argument("ShotPlan: shot counts must be positive");
        }
    }
};

// One projective measurement with readout flips. Born probability is taken
// on the dephased state; the recorded outcome then flips with err_up or
// err_down depending on its true value.
inline int sample_outcome(const BlochVector& state, const Observable& obs,
                          const NoiseConfig& noise, StreamRng& rng) {
    noise.validate();
    const double e = expectation(dephase(state, noise.mu), obs);
    const double p_plus = 0.5 * (1.0 + e);
    int outcome = rng.uniform() < p_plus ? +1 : -1;
    if (outcome == +1) {
        if (rng.bernoulli(noise.err_up)) outcome = -1;
    } else {
        if (rng.bernoulli(noise.err_down)) outcome = +1;
    }
    return outcome;
}

namespace detail {
inline long count_plus(const BlochVector& state, const Observable& obs, const NoiseConfig& noise,
                       long shots, StreamRng rng) {
    long plus = 0;
    for (long s = 0; s < shots; ++s) {
        if (sample_outcome(state, obs, noise, rng) == +1) ++plus;
    }
    return plus;
}
}  // namespace detail

// General entry: six explicit pure preparations, ordered as Preparation.
// Every (preparation, measurement) cell draws from its own child stream, so
// the table is independent of evaluation order.
inline FrequencyTable run_protocol(const std::array<BlochVector, kNumPurePreparations>& states,
                                   const ShotPlan& plan, const NoiseConfig& noise,
                                   std::uint64_t seed) {
    plan.validate();
    noise.validate();
    const StreamRng root{seed};
    FrequencyTable table;
    for (int pi = 0; pi < kNumPurePreparations; ++pi) {
        const auto p = static_cast<Preparation>(pi);
        for (int mi = 0; mi < kNumMeasurements; ++mi) {
            const auto m = static_cast<Measurement>(mi);
            const long shots = plan.shots_for(p);
            const long plus = detail::count_plus(states[pi], observable_of(m), noise, shots,
                                                 root.split(static_cast<std::uint64_t>(pi) * 8 + mi));
            table.record(p, m, plus, shots);
        }
    }
    // Mixture rows: deterministic shot split across the two arms.
    struct MixSpec {
        Preparation row;
        int arm_hi, arm_lo;  // indices into states; hi gets shots_plus
    };
    const MixSpec mixes[2] = {
        {Preparation::MixEps, 0, 1},        // eps_plus heavier
        {Preparation::MixEpsPrime, 3, 2},   // eps_prime_minus heavier
    };
    for (const MixSpec& mix : mixes) {
        const int pi = static_cast<int>(mix.row);
        for (int mi = 0; mi < kNumMeasurements; ++mi) {
            const auto m = static_cast<Measurement>(mi);
            const StreamRng cell = root.split(static_cast<std::uint64_t>(pi) * 8 + mi);
            long plus = detail::count_plus(states[mix.arm_hi], observable_of(m), noise,
                                           plan.shots_plus, cell.split(0));
            plus += detail::count_plus(states[mix.arm_lo], observable_of(m), noise,
                                       plan.shots_minus, cell.split(1));
            table.record(mix.row, m, plus, plan.shots_plus + plan.shots_minus);
        }
    }
    return table;
}

inline std::array<BlochVector, kNumPurePreparations> pure_preparations(const EnsembleQuartet& q) {
    return {q.eps_plus, q.eps_minus, q.eps_prime_plus, q.eps_prime_minus,
            BlochVector{0.0, 1.0, 0.0}, BlochVector{0.0, -1.0, 0.0}};
}

inline FrequencyTable run_protocol(const EnsembleQuartet& q, const ShotPlan& plan,
                                   const NoiseConfig& noise, std::uint64_t seed) {
    return run_protocol(pure_preparations(q), plan, noise, seed);
}

// How measured frequencies are turned into expectations. Readout inversion
// undoes the calibrated flip rates, standing in for the detection-error
// correction applied to the real data.
struct AnalysisOptions {
    bool readout_inversion = true;
    double err_up = 0.0208;
    double err_down = 0.0171;

    static AnalysisOptions from_noise(const NoiseConfig& noise, bool inversion = true) {
        return {inversion, noise.err_up, noise.err_down};
    }
    static AnalysisOptions none() { return {false, 0.0, 0.0}; }

    // Corrected p(+1) from a measured frequency, clamped to [0, 1].
    double corrected(double p_measured) const {
        if (!readout_inversion) return p_measured;
        const double denom = 1.0 - err_up - err_down;
        if (std::abs(denom) < 1e-12) {
            throw std::domain_error("AnalysisOptions: flip rates leave no signal to invert");
        }
        const double p = (p_measured - err_down) / denom;
        return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
    }
};

inline double expectation_of(const FrequencyTable& table, Preparation p, Measurement m,
                             const AnalysisOptions& opts) {
    return 2.0 * opts.corrected(table.frequency(p, m, +1)) - 1.0;
}

// <A>, <B> of the four quartet rows, A = sigma_x and B = sigma_z.
inline ExpectationQuartet quartet_expectations(const FrequencyTable& table,
                                               const AnalysisOptions& opts) {
    ExpectationQuartet q;
    q.a_ep = expectation_of(table, Preparation::EpsPlus, Measurement::SigmaX, opts);
    q.b_ep = expectation_of(table, Preparation::EpsPlus, Measurement::SigmaZ, opts);
    q.a_em = expectation_of(table, Preparation::EpsMinus, Measurement::SigmaX, opts);
    q.b_em = expectation_of(table, Preparation::EpsMinus, Measurement::SigmaZ, opts);
    q.a_epp = expectation_of(table, Preparation::EpsPrimePlus, Measurement::SigmaX, opts);
    q.b_epp = expectation_of(table, Preparation::EpsPrimePlus, Measurement::SigmaZ, opts);
    q.a_epm = expectation_of(table, Preparation::EpsPrimeMinus, Measurement::SigmaX, opts);
    q.b_epm = expectation_of(table, Preparation::EpsPrimeMinus, Measurement::SigmaZ, opts);
    return q;
}

struct BootstrapErrorbars {
    std::array<std::array<double, kNumMeasurements>, kNumPreparations> expectation_std{};
    double ell_std = 0.0;
    double tau_std = 0.0;
};

// Nonparametric bootstrap: every cell is resampled as a binomial at its
// observed frequency, expectations and both criteria are recomputed, and
// population standard deviations are reported.
inline BootstrapErrorbars bootstrap_errorbars(const FrequencyTable& table, int resamples,
                                              std::uint64_t seed, const AnalysisOptions& opts) {
    if (resamples < 100) {
        throw std::invalid_argument("bootstrap_errorbars: need at least 100 resamples");
    }
    const StreamRng root{seed};
    std::array<std::array<double, kNumMeasurements>, kNumPreparations> sum{};
    std::array<std::array<double, kNumMeasurements>, kNumPreparations> sumsq{};
    double ell_sum = 0.0, ell_sumsq = 0.0, tau_sum = 0.0, tau_sumsq = 0.0;

    for (int b = 0; b < resamples; ++b) {
        StreamRng rng = root.split(static_cast<std::uint64_t>(b) + 1);
        FrequencyTable resampled = table;
        for (int pi = 0; pi < kNumPreparations; ++pi) {
            for (int mi = 0; mi < kNumMeasurements; ++mi) {
                const long nn = table.trials[pi][mi];
                if (nn <= 0) continue;
                const double p =
                    static_cast<double>(table.plus_counts[pi][mi]) / static_cast<double>(nn);
                std::binomial_distribution<long> binom(nn, p);
                resampled.plus_counts[pi][mi] = binom(rng);
            }
        }
        for (int pi = 0; pi < kNumPreparations; ++pi) {
            for (int mi = 0; mi < kNumMeasurements; ++mi) {
                if (table.trials[pi][mi] <= 0) continue;
                const double e = expectation_of(resampled, static_cast<Preparation>(pi),
                                                static_cast<Measurement>(mi), opts);
                sum[pi][mi] += e;
                sumsq[pi][mi] += e * e;
            }
        }
        const CriterionReport rep = evaluate_criteria(quartet_expectations(resampled, opts));
        ell_sum += rep.ell;
        ell_sumsq += rep.ell * rep.ell;
        tau_sum += rep.tau;
        tau_sumsq += rep.tau * rep.tau;
    }

    const double inv = 1.0 / static_cast<double>(resamples);
    auto stddev = [inv](double s, double s2) {
        const double var = s2 * inv - (s * inv) * (s * inv);
        return var > 0.0 ? std::sqrt(var) : 0.0;
    };
    BootstrapErrorbars out;
    for (int pi = 0; pi < kNumPreparations; ++pi) {
        for (int mi = 0; mi < kNumMeasurements; ++mi) {
            if (table.trials[pi][mi] > 0) {
                out.expectation_std[pi][mi] = stddev(sum[pi][mi], sumsq[pi][mi]);
            }
        }
    }
    out.ell_std = stddev(ell_sum, ell_sumsq);
    out.tau_std = stddev(tau_sum, tau_sumsq);
    return out;
}

}  // namespace nogo

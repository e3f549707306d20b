// pipeline.hpp
// Command implementations behind the CLI: simulate, sweep, oracle, fit,
// report. Each command validates its configuration up front, computes
// everything, and only then writes its artifacts, so a failing run never
// leaves partial output.

#pragma once

#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "nogo/config.hpp"
#include "nogo/errors.hpp"
#include "nogo/report.hpp"
#include "nogo/svg.hpp"

namespace nogo {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    os << content;
    os.flush();
    if (!os) throw IoError("failed while writing '" + path.string() + "'");
}

// Unit preparations nudged by an isotropic Gaussian of scale sigma and
// renormalized; models directional state-preparation error.
inline std::array<BlochVector, kNumPurePreparations> noisy_preparations(
    const std::array<BlochVector, kNumPurePreparations>& states, double sigma, StreamRng& rng) {
    std::array<BlochVector, kNumPurePreparations> out{};
    for (int i = 0; i < kNumPurePreparations; ++i) {
        BlochVector v = states[i];
        v.x += sigma * rng.normal();
        v.y += sigma * rng.normal();
        v.z += sigma * rng.normal();
        const double n = v.norm();
        out[i] = n > 0.0 ? (1.0 / n) * v : BlochVector{0.0, 0.0, 1.0};
    }
    return out;
}

struct GptPipelineResult {
    PipelineStages stages;
    ExpectationQuartet secondary_quartet{};
    CriterionReport secondary_report{};
};

// Raw -> primary -> secondary chain on one frequency table. t_center anchors
// the equivalence weight (the ideal intersection weight of the run).
inline GptPipelineResult run_gpt_pipeline(const FrequencyTable& table,
                                          const AnalysisOptions& opts, FitMode mode,
                                          double t_center, bool scan) {
    GptPipelineResult r;
    for (int pi = 0; pi < kNumPurePreparations; ++pi) {
        GptState s;
        s.provenance = Provenance::Raw;
        for (int mi = 0; mi < kNumMeasurements; ++mi) {
            s.p[mi] = opts.corrected(
                table.frequency(static_cast<Preparation>(pi), static_cast<Measurement>(mi), +1));
        }
        r.stages.raw[pi] = s;
    }
    const PrimaryFit fit = fit_primaries(table, opts, mode);
    r.stages.primary = fit.states;
    r.stages.secondary = find_secondaries(fit.states, t_center, scan);

    auto first_four = [](const std::array<GptState, kNumPurePreparations>& all) {
        return std::array<GptState, 4>{all[0], all[1], all[2], all[3]};
    };
    r.stages.raw_residual = equivalence_residual(first_four(r.stages.raw), t_center);
    r.stages.primary_residual = equivalence_residual(first_four(r.stages.primary), t_center);
    r.stages.secondary_residual =
        equivalence_residual(r.stages.secondary.secondaries, r.stages.secondary.t_star);
    r.secondary_quartet = criteria_from_states(r.stages.secondary.secondaries);
    r.secondary_report = evaluate_criteria(r.secondary_quartet);
    return r;
}

inline std::string disc_svg(const PipelineStages& st) {
    auto pts = [](const auto& states, int count) {
        std::vector<svg::DiscPoint> out;
        for (int i = 0; i < count; ++i) {
            const BlochVector v = states[i].implied_bloch();
            out.push_back({v.x, v.z});
        }
        return out;
    };
    return svg::disc_plot(pts(st.raw, kNumPurePreparations), pts(st.primary, kNumPurePreparations),
                          pts(st.secondary.secondaries, 4));
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateResult {
    double mu = 0.0;
    double ell_analytic = 0.0;
    double tau_analytic = 0.0;
    CriterionReport raw_report{};  // exact expectations in analytic mode
    std::optional<FrequencyTable> table;
    std::optional<BootstrapErrorbars> errorbars;
    GptPipelineResult pipeline{};
};

namespace detail {

inline std::array<GptState, kNumPurePreparations> exact_states(
    const std::array<BlochVector, kNumPurePreparations>& states, double mu, Provenance prov) {
    std::array<GptState, kNumPurePreparations> out{};
    for (int i = 0; i < kNumPurePreparations; ++i) out[i] = ideal_state(states[i], mu, prov);
    return out;
}

// Exact-probability stand-in for run_gpt_pipeline when sampling is skipped.
inline GptPipelineResult analytic_pipeline(const std::array<BlochVector, kNumPurePreparations>& states,
                                           double mu, double t_center, bool scan) {
    GptPipelineResult r;
    r.stages.raw = exact_states(states, mu, Provenance::Raw);
    r.stages.primary = exact_states(states, mu, Provenance::Primary);
    r.stages.secondary = find_secondaries(r.stages.primary, t_center, scan);
    auto first_four = [](const std::array<GptState, kNumPurePreparations>& all) {
        return std::array<GptState, 4>{all[0], all[1], all[2], all[3]};
    };
    r.stages.raw_residual = equivalence_residual(first_four(r.stages.raw), t_center);
    r.stages.primary_residual = equivalence_residual(first_four(r.stages.primary), t_center);
    r.stages.secondary_residual =
        equivalence_residual(r.stages.secondary.secondaries, r.stages.secondary.t_star);
    r.secondary_quartet = criteria_from_states(r.stages.secondary.secondaries);
    r.secondary_report = evaluate_criteria(r.secondary_quartet);
    return r;
}

}  // namespace detail

// Computation only; artifact writing is separate so callers can embed it.
inline SimulateResult simulate(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.mu_list.size() != 1) {
        throw ConfigError("simulate: expected exactly one mu value");
    }
    const double mu = cfg.mu_list.front();
    const EnsembleQuartet quartet = ensemble_quartet(cfg.theta_rad);

    SimulateResult res;
    res.mu = mu;
    res.ell_analytic = ell_theta_mu(cfg.theta_rad, mu);
    res.tau_analytic = tau_theta_mu(cfg.theta_rad, mu);

    std::array<BlochVector, kNumPurePreparations> states = pure_preparations(quartet);
    if (cfg.prep_noise > 0.0) {
        StreamRng noise_rng = StreamRng(cfg.seed).split(0x6e6f697365);  // distinct noise stream
        states = noisy_preparations(states, cfg.prep_noise, noise_rng);
    }
    const bool scan = cfg.t_mode == TMode::Scan;

    if (cfg.analytic) {
        ExpectationQuartet eq;
        try {
            eq = expectation_quartet(
                {states[0], states[1], states[2], states[3], quartet.theta, quartet.t}, mu);
        } catch (const std::exception& e) {
            throw SamplingError(std::string("analytic expectations: ") + e.what());
        }
        res.raw_report = evaluate_criteria(eq);
        try {
            res.pipeline = detail::analytic_pipeline(states, mu, quartet.t, scan);
        } catch (const EquivalenceInfeasible& e) {
            throw LpInfeasibleError(e.what());
        } catch (const FitError& e) {
            throw FitStageError(e.what());
        }
        return res;
    }

    try {
        res.table = run_protocol(states, cfg.shot_plan(), cfg.noise(mu), cfg.seed);
        const AnalysisOptions opts = cfg.analysis();
        res.raw_report = evaluate_criteria(quartet_expectations(*res.table, opts));
        res.errorbars = bootstrap_errorbars(*res.table, cfg.bootstrap_resamples,
                                            StreamRng::derive(cfg.seed, 0xb001), opts);
        res.raw_report.ell_std = res.errorbars->ell_std;
        res.raw_report.tau_std = res.errorbars->tau_std;
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw SamplingError(std::string("sampling stage: ") + e.what());
    }
    try {
        res.pipeline = run_gpt_pipeline(*res.table, cfg.analysis(), cfg.fit_mode, quartet.t, scan);
    } catch (const EquivalenceInfeasible& e) {
        throw LpInfeasibleError(e.what());
    } catch (const FitError& e) {
        throw FitStageError(e.what());
    }
    return res;
}

inline void write_simulate_artifacts(const RunConfig& cfg, const SimulateResult& res) {
    const std::filesystem::path dir(cfg.out_dir);
    std::vector<CriteriaRow> rows;
    CriteriaRow closed;
    closed.route = "closed_form";
    closed.ell = res.ell_analytic;
    closed.tau = res.tau_analytic;
    closed.violated_linear = res.ell_analytic > 0.0;
    closed.violated_nonlinear = res.tau_analytic > 0.0;
    rows.push_back(closed);
    rows.push_back(criteria_row("raw", res.raw_report));
    rows.push_back(criteria_row("secondary", res.pipeline.secondary_report));
    write_file(dir / "criteria.csv", criteria_csv(rows));
    write_file(dir / "pipeline.csv", pipeline_csv(res.pipeline.stages));
    write_file(dir / "equivalence.svg", disc_svg(res.pipeline.stages));
    if (res.table) {
        std::ostringstream os;
        res.table->write_csv(os);
        write_file(dir / "frequencies.csv", os.str());
    }
}

inline SimulateResult cmd_simulate(const RunConfig& cfg) {
    const SimulateResult res = simulate(cfg);
    write_simulate_artifacts(cfg, res);
    return res;
}

// ---------------------------------------------------------------------------
// sweep

// Locate the zero of f on [0, 1] by bisection; nullopt when no sign change.
template <typename F>
inline std::optional<double> bisect_zero(F f, double lo = 0.0, double hi = 1.0,
                                         double tol = 1e-10) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct SweepResult {
    std::vector<SweepRow> rows;
};

inline SweepResult sweep(const RunConfig& cfg) {
    cfg.validate();
    const EnsembleQuartet quartet = ensemble_quartet(cfg.theta_rad);

    auto run_one = [&cfg, &quartet](std::size_t index) {
        const double mu = cfg.mu_list[index];
        SweepRow row;
        row.mu = mu;
        row.ell_analytic = ell_theta_mu(cfg.theta_rad, mu);
        row.tau_analytic = tau_theta_mu(cfg.theta_rad, mu);
        if (!cfg.analytic) {
            const std::uint64_t seed = StreamRng::derive(cfg.seed, index + 1);
            const FrequencyTable table = run_protocol(quartet, cfg.shot_plan(), cfg.noise(mu), seed);
            const AnalysisOptions opts = cfg.analysis();
            const CriterionReport rep = evaluate_criteria(quartet_expectations(table, opts));
            const BootstrapErrorbars bars = bootstrap_errorbars(
                table, cfg.bootstrap_resamples, StreamRng::derive(seed, 0xb001), opts);
            row.ell_mc = rep.ell;
            row.tau_mc = rep.tau;
            row.ell_std = bars.ell_std;
            row.tau_std = bars.tau_std;
        }
        return row;
    };

    // Independent tasks with pre-split seeds; assembly order is by index, so
    // the result is identical no matter how the scheduler interleaves them.
    std::vector<std::future<SweepRow>> futures;
    futures.reserve(cfg.mu_list.size());
    for (std::size_t i = 0; i < cfg.mu_list.size(); ++i) {
        futures.push_back(std::async(std::launch::async, run_one, i));
    }
    SweepResult res;
    try {
        for (auto& f : futures) res.rows.push_back(f.get());
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw SamplingError(std::string("sweep stage: ") + e.what());
    }
    return res;
}

inline std::string sweep_svg(const std::vector<SweepRow>& rows, double theta) {
    std::vector<svg::SeriesPoint> ell_curve, tau_curve, ell_pts, tau_pts;
    for (double mu = 0.0; mu <= 0.7 + 1e-12; mu += 0.005) {
        ell_curve.push_back({mu, ell_theta_mu(theta, mu), 0.0});
        tau_curve.push_back({mu, tau_theta_mu(theta, mu), 0.0});
    }
    for (const auto& r : rows) {
        if (r.ell_mc) ell_pts.push_back({r.mu, *r.ell_mc, r.ell_std.value_or(0.0)});
        if (r.tau_mc) tau_pts.push_back({r.mu, *r.tau_mc, r.tau_std.value_or(0.0)});
    }
    // bracket stops short of mu = 1 to skip tau's trivial (1 - mu) zero
    const auto ell_zero = bisect_zero([&](double m) { return ell_theta_mu(theta, m); }, 0.0,
                                      1.0 - 1e-9);
    const auto tau_zero = bisect_zero([&](double m) { return tau_theta_mu(theta, m); }, 0.0,
                                      1.0 - 1e-9);
    return svg::sweep_plot(ell_curve, tau_curve, ell_pts, tau_pts, ell_zero.value_or(-1.0),
                           tau_zero.value_or(-1.0));
}

inline SweepResult cmd_sweep(const RunConfig& cfg) {
    const SweepResult res = sweep(cfg);
    const std::filesystem::path dir(cfg.out_dir);
    write_file(dir / "sweep.csv", sweep_csv(res.rows));
    write_file(dir / "sweep.svg", sweep_svg(res.rows, cfg.theta_rad));
    return res;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleReport {
    std::vector<OracleRow> rows;
    int compared = 0;     // rows with a usable tau sign and solver verdict
    int agreements = 0;
    int excluded = 0;     // borderline tau or degenerate solve
    std::vector<int> counterexamples;

    bool all_agree() const { return agreements == compared; }
};

inline OracleRow classify_instance(int index, const ExpectationQuartet& q, double t) {
    OracleRow row;
    row.index = index;
    row.quartet = q;
    row.t = t;
    row.tau = nonlinear_criterion(q).tau;
    const FeasibilityVerdict verdict = check_joint_reality(q, t);
    row.verdict = verdict.status;
    if (std::abs(row.tau) <= 1e-7 ||
        verdict.status == FeasibilityVerdict::Status::Degenerate) {
        row.agreement = "excluded";
    } else {
        const bool agree = (row.tau > 0.0) == !verdict.feasible();
        row.agreement = agree ? "agree" : "disagree";
    }
    return row;
}

inline OracleReport oracle_from_instances(const std::vector<OracleInstanceRow>& instances) {
    OracleReport rep;
    for (const auto& inst : instances) {
        OracleRow row = classify_instance(inst.index, inst.quartet, inst.t);
        if (row.agreement == "excluded") {
            ++rep.excluded;
        } else {
            ++rep.compared;
            if (row.agreement == "agree") {
                ++rep.agreements;
            } else {
                rep.counterexamples.push_back(row.index);
            }
        }
        rep.rows.push_back(row);
    }
    return rep;
}

inline OracleReport oracle(const RunConfig& cfg) {
    cfg.validate();
    StreamRng rng{StreamRng::derive(cfg.seed, 0x04ac1e)};
    std::vector<OracleInstanceRow> instances;
    instances.reserve(static_cast<std::size_t>(cfg.oracle_instances));
    for (int i = 0; i < cfg.oracle_instances; ++i) {
        const IntersectionInstance inst = random_intersection_instance(rng);
        instances.push_back({i, inst.quartet, inst.t});
    }
    return oracle_from_instances(instances);
}

inline OracleReport cmd_oracle(const RunConfig& cfg) {
    const OracleReport rep = oracle(cfg);
    write_file(std::filesystem::path(cfg.out_dir) / "oracle.csv", oracle_csv(rep.rows));
    return rep;
}

inline OracleReport cmd_oracle_replay(const std::string& instances_path, const RunConfig& cfg) {
    cfg.validate();
    std::ifstream in(instances_path);
    if (!in) throw IoError("cannot open '" + instances_path + "'");
    const OracleReport rep = oracle_from_instances(parse_oracle_csv(in));
    write_file(std::filesystem::path(cfg.out_dir) / "oracle.csv", oracle_csv(rep.rows));
    return rep;
}

// ---------------------------------------------------------------------------
// fit & report

inline GptPipelineResult cmd_fit(const std::string& table_path, const RunConfig& cfg) {
    cfg.validate();
    std::ifstream in(table_path);
    if (!in) throw IoError("cannot open '" + table_path + "'");
    const FrequencyTable table = FrequencyTable::read_csv(in);
    const EnsembleQuartet quartet = ensemble_quartet(cfg.theta_rad);
    GptPipelineResult res;
    try {
        res = run_gpt_pipeline(table, cfg.analysis(), cfg.fit_mode, quartet.t,
                               cfg.t_mode == TMode::Scan);
    } catch (const EquivalenceInfeasible& e) {
        throw LpInfeasibleError(e.what());
    } catch (const FitError& e) {
        throw FitStageError(e.what());
    }
    const std::filesystem::path dir(cfg.out_dir);
    std::vector<CriteriaRow> rows;
    rows.push_back(criteria_row("secondary", res.secondary_report));
    write_file(dir / "pipeline.csv", pipeline_csv(res.stages));
    write_file(dir / "criteria.csv", criteria_csv(rows));
    write_file(dir / "equivalence.svg", disc_svg(res.stages));
    return res;
}

inline void cmd_report(const std::string& sweep_path, const RunConfig& cfg) {
    cfg.validate();
    std::ifstream in(sweep_path);
    if (!in) throw IoError("cannot open '" + sweep_path + "'");
    const std::vector<SweepRow> rows = parse_sweep_csv(in);
    write_file(std::filesystem::path(cfg.out_dir) / "sweep.svg", sweep_svg(rows, cfg.theta_rad));
}

}  // namespace nogo

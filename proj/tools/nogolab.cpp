// nogolab: simulate dephased qubit ensembles, evaluate the joint-reality
// criteria, cross-validate against the LP feasibility oracle, and run the
// operational-equivalence data-analysis pipeline.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nogo/pipeline.hpp"

namespace {

struct FlagOverrides {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool analytic = false;
    std::string fit_mode;
    double theta = 0.0;
    bool theta_set = false;
    std::vector<double> mu;
    int instances = -1;
};

nogo::RunConfig resolve_config(const CLI::App& sub, const FlagOverrides& fo) {
    auto given = [&sub](const std::string& name) {
        const CLI::Option* opt = sub.get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    nogo::RunConfig cfg;
    if (!fo.config_path.empty()) cfg = nogo::RunConfig::load(fo.config_path);
    if (given("--seed")) cfg.seed = fo.seed;
    if (given("--out")) cfg.out_dir = fo.out_dir;
    if (given("--analytic")) cfg.analytic = true;
    if (given("--fit-mode")) {
        if (fo.fit_mode == "qubit") {
            cfg.fit_mode = nogo::FitMode::Qubit;
        } else if (fo.fit_mode == "gpt_rank") {
            cfg.fit_mode = nogo::FitMode::GptRank;
        } else {
            throw nogo::ConfigError("--fit-mode must be 'qubit' or 'gpt_rank'");
        }
    }
    if (given("--theta")) cfg.theta_rad = fo.theta;
    if (given("--mu")) cfg.mu_list = fo.mu;
    if (given("--instances")) cfg.oracle_instances = fo.instances;
    return cfg;
}

void print_report(const char* route, const nogo::CriterionReport& rep) {
    std::printf("%-10s ell = %+.8f", route, rep.ell);
    if (rep.ell_std) std::printf(" +- %.8f", *rep.ell_std);
    std::printf("   tau = %+.8f", rep.tau);
    if (rep.tau_std) std::printf(" +- %.8f", *rep.tau_std);
    if (!rep.violated_linear && !rep.violated_nonlinear) {
        std::printf("   [no violation]");
    } else {
        std::printf("   [violated:%s%s]", rep.violated_linear ? " linear" : "",
                    rep.violated_nonlinear ? " nonlinear" : "");
    }
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"joint-reality no-go laboratory"};
    app.require_subcommand(1);

    FlagOverrides fo;
    std::string table_path, sweep_path, replay_path;

    auto add_common = [&fo](CLI::App* sub) {
        sub->add_option("--config", fo.config_path, "flat key-value configuration file");
        sub->add_option("--seed", fo.seed, "random seed override");
        sub->add_option("--out", fo.out_dir, "output directory override");
    };

    CLI::App* sim = app.add_subcommand("simulate", "single-mu run: sample, fit, evaluate");
    add_common(sim);
    sim->add_flag("--analytic", fo.analytic, "skip sampling, use exact probabilities");
    sim->add_option("--fit-mode", fo.fit_mode, "primary fit constraint: qubit or gpt_rank");
    sim->add_option("--theta", fo.theta, "ensemble family angle in radians");
    sim->add_option("--mu", fo.mu, "dephasing factor");

    CLI::App* swp = app.add_subcommand("sweep", "evaluate criteria across dephasing values");
    add_common(swp);
    swp->add_flag("--analytic", fo.analytic, "analytic curves only, no sampling");
    swp->add_option("--fit-mode", fo.fit_mode, "primary fit constraint: qubit or gpt_rank");
    swp->add_option("--theta", fo.theta, "ensemble family angle in radians");
    swp->add_option("--mu", fo.mu, "dephasing factors (repeatable)");

    CLI::App* orc = app.add_subcommand("oracle", "cross-validate criterion sign vs LP feasibility");
    add_common(orc);
    orc->add_option("--instances", fo.instances, "number of random instances");
    orc->add_option("--replay", replay_path, "re-evaluate instances from a previous oracle.csv");

    CLI::App* fit = app.add_subcommand("fit", "run the equivalence pipeline on a frequency CSV");
    add_common(fit);
    fit->add_option("table", table_path, "frequency table CSV")->required();
    fit->add_option("--fit-mode", fo.fit_mode, "primary fit constraint: qubit or gpt_rank");
    fit->add_option("--theta", fo.theta, "ensemble family angle in radians");

    CLI::App* rpt = app.add_subcommand("report", "re-render the sweep figure from sweep.csv");
    add_common(rpt);
    rpt->add_option("sweep", sweep_path, "sweep CSV produced by the sweep command")->required();
    rpt->add_option("--theta", fo.theta, "ensemble family angle in radians");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : nogo::exit_code::kConfig;
    }

    try {
        if (sim->parsed()) {
            const nogo::RunConfig cfg = resolve_config(*sim, fo);
            const nogo::SimulateResult res = nogo::cmd_simulate(cfg);
            std::printf("mu = %g  (analytic ell = %+.8f, tau = %+.8f)\n", res.mu,
                        res.ell_analytic, res.tau_analytic);
            print_report("raw", res.raw_report);
            print_report("secondary", res.pipeline.secondary_report);
            std::printf("similarity = %.6f at t* = %.4f, residual = %.3g\n",
                        res.pipeline.stages.secondary.similarity,
                        res.pipeline.stages.secondary.t_star,
                        res.pipeline.stages.secondary_residual);
            std::printf("artifacts written to %s\n", cfg.out_dir.c_str());
        } else if (swp->parsed()) {
            const nogo::RunConfig cfg = resolve_config(*swp, fo);
            const nogo::SweepResult res = nogo::cmd_sweep(cfg);
            for (const auto& row : res.rows) {
                std::printf("mu = %-8g ell = %+.6f tau = %+.6f", row.mu, row.ell_analytic,
                            row.tau_analytic);
                if (row.ell_mc) {
                    std::printf("   mc: ell = %+.6f +- %.6f tau = %+.6f +- %.6f", *row.ell_mc,
                                row.ell_std.value_or(0.0), *row.tau_mc, row.tau_std.value_or(0.0));
                }
                std::printf("\n");
            }
            std::printf("artifacts written to %s\n", cfg.out_dir.c_str());
        } else if (orc->parsed()) {
            const nogo::RunConfig cfg = resolve_config(*orc, fo);
            const nogo::OracleReport rep = replay_path.empty()
                                               ? nogo::cmd_oracle(cfg)
                                               : nogo::cmd_oracle_replay(replay_path, cfg);
            if (rep.compared == 0) {
                std::printf("oracle: no instances compared (%d excluded)\n", rep.excluded);
            } else {
                std::printf("oracle: %d compared, %d agree (%.2f%%), %d excluded\n", rep.compared,
                            rep.agreements,
                            100.0 * static_cast<double>(rep.agreements) /
                                static_cast<double>(rep.compared),
                            rep.excluded);
            }
            for (int idx : rep.counterexamples) {
                const auto& row = rep.rows[static_cast<std::size_t>(idx)];
                std::printf("counterexample %d: quartet = (%.17g,%.17g, %.17g,%.17g, %.17g,%.17g, "
                            "%.17g,%.17g) t = %.17g tau = %.17g verdict = %s\n",
                            row.index, row.quartet.a_ep, row.quartet.b_ep, row.quartet.a_em,
                            row.quartet.b_em, row.quartet.a_epp, row.quartet.b_epp,
                            row.quartet.a_epm, row.quartet.b_epm, row.t, row.tau,
                            row.verdict == nogo::FeasibilityVerdict::Status::Feasible
                                ? "feasible"
                                : "infeasible");
            }
            std::printf("artifacts written to %s\n", cfg.out_dir.c_str());
        } else if (fit->parsed()) {
            const nogo::RunConfig cfg = resolve_config(*fit, fo);
            const nogo::GptPipelineResult res = nogo::cmd_fit(table_path, cfg);
            print_report("secondary", res.secondary_report);
            std::printf("similarity = %.6f at t* = %.4f, residual = %.3g\n",
                        res.stages.secondary.similarity, res.stages.secondary.t_star,
                        res.stages.secondary_residual);
            std::printf("artifacts written to %s\n", cfg.out_dir.c_str());
        } else if (rpt->parsed()) {
            const nogo::RunConfig cfg = resolve_config(*rpt, fo);
            nogo::cmd_report(sweep_path, cfg);
            std::printf("figure written to %s\n", cfg.out_dir.c_str());
        }
    } catch (const nogo::StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code;
    } catch (const nogo::CsvError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nogo::exit_code::kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

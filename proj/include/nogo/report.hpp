// report.hpp
// CSV formats for the command-line reports. Doubles are written with full
// precision so report files replay losslessly; the writers are deterministic
// so identical runs produce byte-identical files.

#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nogo/config.hpp"
#include "nogo/criteria.hpp"
#include "nogo/gpt.hpp"
#include "nogo/oracle.hpp"
#include "nogo/sampler.hpp"

namespace nogo {

inline std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
}

// ---------------------------------------------------------------------------
// criteria.csv: one row per evaluation route.

struct CriteriaRow {
    std::string route;  // closed_form, raw, secondary
    double ell = 0.0;
    double tau = 0.0;
    std::optional<double> c_star;
    std::optional<SignChoice> tau_argmax;
    bool violated_linear = false;
    bool violated_nonlinear = false;
    std::optional<double> ell_std;
    std::optional<double> tau_std;
};

inline CriteriaRow criteria_row(const std::string& route, const CriterionReport& rep) {
    CriteriaRow row;
    row.route = route;
    row.ell = rep.ell;
    row.tau = rep.tau;
    row.c_star = rep.ell_argmax_c;
    row.tau_argmax = rep.tau_argmax;
    row.violated_linear = rep.violated_linear;
    row.violated_nonlinear = rep.violated_nonlinear;
    row.ell_std = rep.ell_std;
    row.tau_std = rep.tau_std;
    return row;
}

inline std::string criteria_csv(const std::vector<CriteriaRow>& rows) {
    std::ostringstream os;
    os << "route,ell,c_star,tau,p,q,r,s,violated_linear,violated_nonlinear,ell_std,tau_std\n";
    for (const auto& r : rows) {
        os << r.route << ',' << fmt_double(r.ell) << ',' << fmt_opt(r.c_star) << ','
           << fmt_double(r.tau) << ',';
        if (r.tau_argmax) {
            os << r.tau_argmax->p << ',' << r.tau_argmax->q << ',' << r.tau_argmax->r << ','
               << r.tau_argmax->s;
        } else {
            os << ",,,";
        }
        os << ',' << (r.violated_linear ? "true" : "false") << ','
           << (r.violated_nonlinear ? "true" : "false") << ',' << fmt_opt(r.ell_std) << ','
           << fmt_opt(r.tau_std) << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// pipeline.csv: raw / primary / secondary states plus a summary row.

struct PipelineStages {
    std::array<GptState, kNumPurePreparations> raw{};
    std::array<GptState, kNumPurePreparations> primary{};
    SecondaryAssignment secondary{};
    double raw_residual = 0.0;
    double primary_residual = 0.0;
    double secondary_residual = 0.0;
};

inline std::string pipeline_csv(const PipelineStages& st) {
    std::ostringstream os;
    os << "stage,preparation,p_x,p_y,p_z,similarity,residual\n";
    auto state_row = [&os](const char* stage, Preparation p, const GptState& s,
                           const std::optional<double>& similarity, double residual) {
        os << stage << ',' << label(p) << ',' << fmt_double(s.p[0]) << ',' << fmt_double(s.p[1])
           << ',' << fmt_double(s.p[2]) << ',' << fmt_opt(similarity) << ','
           << fmt_double(residual) << '\n';
    };
    for (int i = 0; i < kNumPurePreparations; ++i) {
        state_row("raw", static_cast<Preparation>(i), st.raw[i], std::nullopt, st.raw_residual);
    }
    for (int i = 0; i < kNumPurePreparations; ++i) {
        state_row("primary", static_cast<Preparation>(i), st.primary[i], std::nullopt,
                  st.primary_residual);
    }
    for (int i = 0; i < 4; ++i) {
        state_row("secondary", static_cast<Preparation>(i), st.secondary.secondaries[i],
                  st.secondary.own_weight(i), st.secondary_residual);
    }
    os << "summary,all,,,," << fmt_double(st.secondary.similarity) << ','
       << fmt_double(st.secondary_residual) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// sweep.csv: analytic curves and Monte Carlo estimates per dephasing value.

struct SweepRow {
    double mu = 0.0;
    double ell_analytic = 0.0;
    double tau_analytic = 0.0;
    std::optional<double> ell_mc;
    std::optional<double> tau_mc;
    std::optional<double> ell_std;
    std::optional<double> tau_std;
};

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "mu,ell_analytic,tau_analytic,ell_mc,tau_mc,ell_std,tau_std\n";
    for (const auto& r : rows) {
        os << fmt_double(r.mu) << ',' << fmt_double(r.ell_analytic) << ','
           << fmt_double(r.tau_analytic) << ',' << fmt_opt(r.ell_mc) << ',' << fmt_opt(r.tau_mc)
           << ',' << fmt_opt(r.ell_std) << ',' << fmt_opt(r.tau_std) << '\n';
    }
    return os.str();
}

inline std::vector<SweepRow> parse_sweep_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw CsvError(1, 1, "empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "mu,ell_analytic,tau_analytic,ell_mc,tau_mc,ell_std,tau_std") {
        throw CsvError(1, 1, "unexpected header '" + line + "'");
    }
    std::vector<SweepRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        for (;;) {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (fields.size() != 7) throw CsvError(lineno, 1, "expected 7 fields");
        auto req = [&](int col) {
            try {
                std::size_t used = 0;
                const double v = std::stod(fields[col], &used);
                if (used != fields[col].size()) throw std::invalid_argument("");
                return v;
            } catch (const std::exception&) {
                throw CsvError(lineno, col + 1, "'" + fields[col] + "' is not a number");
            }
        };
        auto opt = [&](int col) -> std::optional<double> {
            if (fields[col].empty()) return std::nullopt;
            return req(col);
        };
        SweepRow r;
        r.mu = req(0);
        r.ell_analytic = req(1);
        r.tau_analytic = req(2);
        r.ell_mc = opt(3);
        r.tau_mc = opt(4);
        r.ell_std = opt(5);
        r.tau_std = opt(6);
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// oracle.csv: instances, criterion value, solver verdict, agreement status.

struct OracleRow {
    int index = 0;
    ExpectationQuartet quartet{};
    double t = 0.5;
    double tau = 0.0;
    FeasibilityVerdict::Status verdict = FeasibilityVerdict::Status::Feasible;
    // agree / disagree, or excluded for borderline tau and degenerate solves
    std::string agreement;
};

inline std::string oracle_csv(const std::vector<OracleRow>& rows) {
    std::ostringstream os;
    os << "index,a_ep,b_ep,a_em,b_em,a_epp,b_epp,a_epm,b_epm,t,tau,lp_verdict,agreement\n";
    for (const auto& r : rows) {
        const char* verdict = r.verdict == FeasibilityVerdict::Status::Feasible ? "feasible"
                              : r.verdict == FeasibilityVerdict::Status::Infeasible
                                  ? "infeasible"
                                  : "degenerate";
        os << r.index << ',' << fmt_double(r.quartet.a_ep) << ',' << fmt_double(r.quartet.b_ep)
           << ',' << fmt_double(r.quartet.a_em) << ',' << fmt_double(r.quartet.b_em) << ','
           << fmt_double(r.quartet.a_epp) << ',' << fmt_double(r.quartet.b_epp) << ','
           << fmt_double(r.quartet.a_epm) << ',' << fmt_double(r.quartet.b_epm) << ','
           << fmt_double(r.t) << ',' << fmt_double(r.tau) << ',' << verdict << ',' << r.agreement
           << '\n';
    }
    return os.str();
}

// Reads back only the instance columns; criterion and verdict are recomputed
// on replay.
struct OracleInstanceRow {
    int index = 0;
    ExpectationQuartet quartet{};
    double t = 0.5;
};

inline std::vector<OracleInstanceRow> parse_oracle_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw CsvError(1, 1, "empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "index,a_ep,b_ep,a_em,b_em,a_epp,b_epp,a_epm,b_epm,t,tau,lp_verdict,agreement") {
        throw CsvError(1, 1, "unexpected header '" + line + "'");
    }
    std::vector<OracleInstanceRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        for (;;) {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (fields.size() != 13) throw CsvError(lineno, 1, "expected 13 fields");
        auto num = [&](int col) {
            try {
                std::size_t used = 0;
                const double v = std::stod(fields[col], &used);
                if (used != fields[col].size()) throw std::invalid_argument("");
                return v;
            } catch (const std::exception&) {
                throw CsvError(lineno, col + 1, "'" + fields[col] + "' is not a number");
            }
        };
        OracleInstanceRow r;
        try {
            r.index = std::stoi(fields[0]);
        } catch (const std::exception&) {
            throw CsvError(lineno, 1, "'" + fields[0] + "' is not an index");
        }
        r.quartet = {num(1), num(2), num(3), num(4), num(5), num(6), num(7), num(8)};
        r.t = num(9);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace nogo

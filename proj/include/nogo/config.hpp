// config.hpp
// Flat key-value run configuration. Keys carry their units; values round-trip
// losslessly through serialize/parse.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nogo/errors.hpp"
#include "nogo/gpt.hpp"

namespace nogo {

enum class TMode { Fixed, Scan };

// Lossless double formatting (shortest %.17g is overkill but unambiguous).
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RunConfig {
    double theta_rad = std::acos(-1.0) / 3.0;
    std::vector<double> mu_list{0.0};
    long shots_plus = 6890;
    long shots_minus = 3110;
    long shots_y = 10000;
    double err_up = 0.0208;
    double err_down = 0.0171;
    bool readout_inversion = true;
    std::uint64_t seed = 1;
    FitMode fit_mode = FitMode::Qubit;
    TMode t_mode = TMode::Scan;
    std::string out_dir = "out";
    int bootstrap_resamples = 1000;
    int oracle_instances = 1000;
    double prep_noise = 0.0;
    bool analytic = false;

    bool operator==(const RunConfig&) const = default;

    void validate() const {
        const double half_pi = std::acos(-1.0) / 2.0;
        if (!(theta_rad >= 0.0 && theta_rad <= half_pi)) {
            throw ConfigError("theta_rad must lie in [0, pi/2]");
        }
        if (mu_list.empty()) throw ConfigError("mu_list must not be empty");
        for (double mu : mu_list) {
            if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("mu values must lie in [0, 1]");
        }
        if (shots_plus <= 0 || shots_minus <= 0 || shots_y <= 0) {
            throw ConfigError("shot counts must be positive");
        }
        if (!(err_up >= 0.0 && err_up < 0.5) || !(err_down >= 0.0 && err_down < 0.5)) {
            throw ConfigError("detection error rates must lie in [0, 0.5)");
        }
        if (bootstrap_resamples < 100) throw ConfigError("bootstrap_resamples must be >= 100");
        if (oracle_instances < 0) throw ConfigError("oracle_instances must be >= 0");
        if (!(prep_noise >= 0.0 && prep_noise < 1.0)) {
            throw ConfigError("prep_noise must lie in [0, 1)");
        }
        if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
    }

    NoiseConfig noise(double mu) const { return {err_up, err_down, mu}; }
    AnalysisOptions analysis() const { return {readout_inversion, err_up, err_down}; }
    ShotPlan shot_plan() const { return {shots_plus, shots_minus, shots_y}; }

    std::string serialize() const {
        std::ostringstream os;
        os << "theta_rad = " << fmt_double(theta_rad) << '\n';
        os << "mu_list = ";
        for (std::size_t i = 0; i < mu_list.size(); ++i) {
            os << (i ? "," : "") << fmt_double(mu_list[i]);
        }
        os << '\n';
        os << "shots_plus = " << shots_plus << '\n';
        os << "shots_minus = " << shots_minus << '\n';
        os << "shots_y = " << shots_y << '\n';
        os << "err_up = " << fmt_double(err_up) << '\n';
        os << "err_down = " << fmt_double(err_down) << '\n';
        os << "readout_inversion = " << (readout_inversion ? "true" : "false") << '\n';
        os << "seed = " << seed << '\n';
        os << "fit_mode = " << (fit_mode == FitMode::Qubit ? "qubit" : "gpt_rank") << '\n';
        os << "t_mode = " << (t_mode == TMode::Scan ? "scan" : "fixed") << '\n';
        os << "out_dir = " << out_dir << '\n';
        os << "bootstrap_resamples = " << bootstrap_resamples << '\n';
        os << "oracle_instances = " << oracle_instances << '\n';
        os << "prep_noise = " << fmt_double(prep_noise) << '\n';
        os << "analytic = " << (analytic ? "true" : "false") << '\n';
        return os.str();
    }

    static RunConfig parse(const std::string& text) {
        RunConfig cfg;
        std::istringstream is(text);
        std::string line;
        int lineno = 0;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        while (std::getline(is, line)) {
            ++lineno;
            const std::string stripped = trim(line);
            if (stripped.empty() || stripped.front() == '#') continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
            }
            const std::string key = trim(stripped.substr(0, eq));
            const std::string value = trim(stripped.substr(eq + 1));
            auto bad = [&](const std::string& why) {
                return ConfigError("config line " + std::to_string(lineno) + ", key '" + key +
                                   "': " + why);
            };
            auto as_double = [&](const std::string& v) {
                try {
                    std::size_t used = 0;
                    const double d = std::stod(v, &used);
                    if (used != v.size()) throw std::invalid_argument("");
                    return d;
                } catch (const std::exception&) {
                    throw bad("'" + v + "' is not a number");
                }
            };
            auto as_long = [&](const std::string& v) {
                try {
                    std::size_t used = 0;
                    const long l = std::stol(v, &used);
                    if (used != v.size()) throw std::invalid_argument("");
                    return l;
                } catch (const std::exception&) {
                    throw bad("'" + v + "' is not an integer");
                }
            };
            auto as_bool = [&](const std::string& v) {
                if (v == "true" || v == "1") return true;
                if (v == "false" || v == "0") return false;
                throw bad("'" + v + "' is not a boolean");
            };
            if (key == "theta_rad") {
                cfg.theta_rad = as_double(value);
            } else if (key == "mu_list") {
                cfg.mu_list.clear();
                std::istringstream vs(value);
                std::string item;
                while (std::getline(vs, item, ',')) cfg.mu_list.push_back(as_double(trim(item)));
                if (cfg.mu_list.empty()) throw bad("empty list");
            } else if (key == "shots_plus") {
                cfg.shots_plus = as_long(value);
            } else if (key == "shots_minus") {
                cfg.shots_minus = as_long(value);
            } else if (key == "shots_y") {
                cfg.shots_y = as_long(value);
            } else if (key == "err_up") {
                cfg.err_up = as_double(value);
            } else if (key == "err_down") {
                cfg.err_down = as_double(value);
            } else if (key == "readout_inversion") {
                cfg.readout_inversion = as_bool(value);
            } else if (key == "seed") {
                try {
                    cfg.seed = std::stoull(value);
                } catch (const std::exception&) {
                    throw bad("'" + value + "' is not an unsigned integer");
                }
            } else if (key == "fit_mode") {
                if (value == "qubit") {
                    cfg.fit_mode = FitMode::Qubit;
                } else if (value == "gpt_rank") {
                    cfg.fit_mode = FitMode::GptRank;
                } else {
                    throw bad("expected 'qubit' or 'gpt_rank'");
                }
            } else if (key == "t_mode") {
                if (value == "scan") {
                    cfg.t_mode = TMode::Scan;
                } else if (value == "fixed") {
                    cfg.t_mode = TMode::Fixed;
                } else {
                    throw bad("expected 'scan' or 'fixed'");
                }
            } else if (key == "out_dir") {
                cfg.out_dir = value;
            } else if (key == "bootstrap_resamples") {
                cfg.bootstrap_resamples = static_cast<int>(as_long(value));
            } else if (key == "oracle_instances") {
                cfg.oracle_instances = static_cast<int>(as_long(value));
            } else if (key == "prep_noise") {
                cfg.prep_noise = as_double(value);
            } else if (key == "analytic") {
                cfg.analytic = as_bool(value);
            } else {
                throw bad("unknown key");
            }
        }
        return cfg;
    }

    static RunConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }
};

}  // namespace nogo

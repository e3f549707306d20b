// errors.hpp
// Stage-tagged failures, mapped one-to-one onto process exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace nogo {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kConfig = 2;
inline constexpr int kSampling = 3;
inline constexpr int kFit = 4;
inline constexpr int kLpInfeasible = 5;
inline constexpr int kIo = 6;
}  // namespace exit_code

struct StageError : std::runtime_error {
    int code;
    StageError(int code_, const std::string& msg) : std::runtime_error(msg), code(code_) {}
};

struct ConfigError : StageError {
    explicit ConfigError(const std::string& msg) : StageError(exit_code::kConfig, msg) {}
};

struct SamplingError : StageError {
    explicit SamplingError(const std::string& msg) : StageError(exit_code::kSampling, msg) {}
};

struct FitStageError : StageError {
    explicit FitStageError(const std::string& msg) : StageError(exit_code::kFit, msg) {}
};

struct LpInfeasibleError : StageError {
    explicit LpInfeasibleError(const std::string& msg)
        : StageError(exit_code::kLpInfeasible, msg) {}
};

struct IoError : StageError {
    explicit IoError(const std::string& msg) : StageError(exit_code::kIo, msg) {}
};

}  // namespace nogo

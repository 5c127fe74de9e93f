#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qubofit/basis.hpp"
#include "qubofit/encoding.hpp"
#include "qubofit/leastsq.hpp"

namespace qubofit {

enum class Experiment {
    Table1,           // linear regression, x/2 + 1
    Table2,           // linear regression, -x/4 + 1/3
    Table3,           // RMSE agreement versus sample count n
    FigDSweep,        // triangular fit of cubic data versus d
    FigMSweep,        // triangular fit of trigonometric/quadratic data versus m
    ChebyshevTable,   // quadratic Chebyshev fit of quadratic data
    ChebyshevDSweep,  // cubic Chebyshev fit of cubic data versus d
    QuboHeatmap,      // QUBO matrices of a triangular and a Chebyshev fit
    Table4,           // just-in-time arrival policies
    FigValueMse,      // fitted value error versus sample count and m
    FigMError,        // fitted value error of tabu and annealer versus m
};

const char* to_string(Experiment e) noexcept;
Experiment experiment_from_string(const std::string& name);
const std::vector<Experiment>& all_experiments();

struct ExperimentSpec {
    Experiment name = Experiment::Table1;
    /// Key/value overrides of the experiment's defaults; unknown keys are rejected.
    nlohmann::json overrides = nlohmann::json::object();
    std::uint64_t seed = 42;
    std::filesystem::path output_dir = ".";
    /// When set, annealer columns come from this external sampler instead of
    /// simulated annealing.
    std::string external_command;
};

struct ExperimentReport {
    std::vector<std::filesystem::path> files;  // everything written, manifest last
    nlohmann::json manifest;
};

/// Runs one experiment and writes its CSVs plus manifest.json into
/// spec.output_dir. Nothing is left behind if it throws.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Upper-triangular QUBO of the fit of `data` as CSV (row, col, value).
std::string qubo_heatmap_data(BasisKind kind, std::size_t m, const FixedPointFormat& fmt,
                              const Dataset& data);

/// Package version with the git revision the build was configured from.
std::string version_string();

}  // namespace qubofit

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qubofit/data.hpp"
#include "qubofit/dynprog.hpp"
#include "qubofit/encoding.hpp"
#include "qubofit/leastsq.hpp"
#include "qubofit/solvers.hpp"

namespace qubofit::io {

using nlohmann::json;

/// Shortest text that round-trips the double ("%.17g").
std::string number(double v);

/// Comma-separated table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string str() const;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// {"n": N, "entries": [[row, col, value], ...], "meta": {m, d, p, y_min, y_max}}
/// with the nonzero entries of the upper-triangular form.
json qubo_to_json(const QuboProblem& q);
QuboProblem qubo_from_json(const json& j);

json to_json(const SolveResult& r);
json to_json(const FitResult& fit);
json to_json(const Policy& policy);
json to_json(const DatasetMeta& meta);
json to_json(const JitScenario& s);

DatasetMeta dataset_meta_from_json(const json& j);

/// Keys: ell, v_max, T, alpha, x0, n_states, grid_actions, n_actions, n_samples, m, d, p,
/// backend, seed.
/// Missing keys keep their defaults; unknown keys are rejected.
JitScenario scenario_from_json(const json& j);

/// Header "x,y", one row per point, full double precision.
std::string dataset_csv(const Dataset& data);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset_csv(const std::filesystem::path& path,
                         std::optional<Normalization> norm = std::nullopt);

/// Upper-triangular entries of Q as "row,col,value" (all cells, zeros included).
std::string qubo_heatmap_csv(const QuboProblem& q);

}  // namespace qubofit::io

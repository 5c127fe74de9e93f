#include "qubofit/harness.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <system_error>

#include "qubofit/data.hpp"
#include "qubofit/dynprog.hpp"
#include "qubofit/errors.hpp"
#include "qubofit/io.hpp"
#include "qubofit/random.hpp"
#include "qubofit/solvers.hpp"

#ifndef QUBOFIT_DESCRIBE
#define QUBOFIT_DESCRIBE "unknown"
#endif

namespace qubofit {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using io::number;

struct ExperimentName {
    Experiment id;
    const char* name;
};

constexpr ExperimentName kExperiments[] = {
    {Experiment::Table1, "table1"},
    {Experiment::Table2, "table2"},
    {Experiment::Table3, "table3"},
    {Experiment::FigDSweep, "fig_d_sweep"},
    {Experiment::FigMSweep, "fig_m_sweep"},
    {Experiment::ChebyshevTable, "chebyshev_table"},
    {Experiment::ChebyshevDSweep, "chebyshev_d_sweep"},
    {Experiment::QuboHeatmap, "qubo_heatmap"},
    {Experiment::Table4, "table4"},
    {Experiment::FigValueMse, "fig_value_mse"},
    {Experiment::FigMError, "fig_m_error"},
};

/// Typed access to the override object; keys never read are reported as unknown.
class Knobs {
public:
    explicit Knobs(const json& overrides) : j_(overrides) {
        if (!j_.is_object()) {
            throw ValidationError("experiment overrides must be a JSON object");
        }
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return j_.contains(key);
    }

    double real(const std::string& key, double fallback) {
        if (!has(key)) {
            return fallback;
        }
        if (!j_[key].is_number()) {
            throw ValidationError("override '" + key + "' must be a number");
        }
        return j_[key].get<double>();
    }

    std::size_t count(const std::string& key, std::size_t fallback, std::size_t min = 1) {
        if (!has(key)) {
            return fallback;
        }
        return to_count(key, j_[key], min);
    }

    std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> fallback,
                                    std::size_t min = 1) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = j_[key];
        if (!v.is_array() || v.empty()) {
            throw ValidationError("override '" + key + "' must be a non-empty array");
        }
        std::vector<std::size_t> out;
        for (const auto& e : v) {
            out.push_back(to_count(key, e, min));
        }
        return out;
    }

    std::vector<double> reals(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = j_[key];
        if (!v.is_array() || v.empty()) {
            throw ValidationError("override '" + key + "' must be a non-empty array");
        }
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) {
                throw ValidationError("override '" + key + "' must hold numbers");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::string text(const std::string& key, std::string fallback) {
        if (!has(key)) {
            return fallback;
        }
        if (!j_[key].is_string()) {
            throw ValidationError("override '" + key + "' must be a string");
        }
        return j_[key].get<std::string>();
    }

    std::vector<std::string> texts(const std::string& key, std::vector<std::string> fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = j_[key];
        if (!v.is_array() || v.empty()) {
            throw ValidationError("override '" + key + "' must be a non-empty array");
        }
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) {
                throw ValidationError("override '" + key + "' must hold strings");
            }
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (const auto& [key, _] : j_.items()) {
            if (!used_.contains(key)) {
                throw ValidationError("unknown override '" + key + "' for this experiment");
            }
        }
    }

private:
    static std::size_t to_count(const std::string& key, const json& v, std::size_t min) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(min)) {
            throw ValidationError("override '" + key + "' must be an integer >= " + std::to_string(min));
        }
        return v.get<std::size_t>();
    }

    const json& j_;
    std::set<std::string> used_;
};

/// Files are written to a hidden staging directory and moved into place only
/// once the whole experiment has succeeded.
class Output {
public:
    Output(fs::path dir, const std::string& name) : dir_(std::move(dir)) {
        fs::create_directories(dir_);
        staging_ = dir_ / (".partial-" + name);
        fs::remove_all(staging_);
        fs::create_directories(staging_);
    }
    Output(const Output&) = delete;
    Output& operator=(const Output&) = delete;

    ~Output() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(staging_, ec);
        }
    }

    void write(const std::string& file, const std::string& text) {
        io::write_text(staging_ / file, text);
        names_.push_back(file);
    }

    std::vector<fs::path> commit() {
        std::vector<fs::path> out;
        for (const auto& name : names_) {
            fs::rename(staging_ / name, dir_ / name);
            out.push_back(dir_ / name);
        }
        fs::remove_all(staging_);
        committed_ = true;
        return out;
    }

private:
    fs::path dir_;
    fs::path staging_;
    std::vector<std::string> names_;
    bool committed_ = false;
};

struct Solvers {
    SolverConfig tabu;
    SolverConfig annealer;
    std::string annealer_label;  // "simulated_annealing" or "external"
};

Solvers read_solvers(Knobs& k, const ExperimentSpec& spec, std::uint64_t seed) {
    Solvers s;
    s.tabu.backend = Backend::Tabu;
    s.tabu.params = SolverParams::tabu_defaults(seed);
    s.tabu.params.restarts = k.count("tabu_restarts", s.tabu.params.restarts);
    s.tabu.params.iterations_per_restart = k.count("tabu_iterations", s.tabu.params.iterations_per_restart);
    if (k.has("tabu_tenure")) {
        s.tabu.params.tabu_tenure = k.count("tabu_tenure", 1);
    }
    if (spec.external_command.empty()) {
        s.annealer.backend = Backend::Annealing;
        s.annealer_label = "simulated_annealing";
    } else {
        s.annealer.backend = Backend::External;
        s.annealer.external_command = spec.external_command;
        s.annealer_label = "external";
    }
    s.annealer.params = SolverParams::anneal_defaults(seed);
    s.annealer.params.restarts = k.count("anneal_restarts", s.annealer.params.restarts);
    s.annealer.params.iterations_per_restart = k.count("anneal_sweeps", s.annealer.params.iterations_per_restart);
    const std::size_t threads = k.count("threads", 1);
    s.tabu.params.threads = threads;
    s.annealer.params.threads = threads;
    s.tabu.params.validate();
    s.annealer.params.validate();
    return s;
}

json solvers_json(const Solvers& s) {
    auto params = [](const SolverParams& p) {
        json j{{"restarts", p.restarts}, {"iterations_per_restart", p.iterations_per_restart}, {"seed", p.seed}};
        if (p.tabu_tenure) {
            j["tabu_tenure"] = *p.tabu_tenure;
        }
        return j;
    };
    json j{{"tabu", params(s.tabu.params)}, {"annealer", params(s.annealer.params)}};
    j["annealer"]["kind"] = s.annealer_label;
    if (!s.annealer.external_command.empty()) {
        j["annealer"]["command"] = s.annealer.external_command;
    }
    return j;
}

struct DataKnobs {
    std::size_t n = 64;
    double sigma = 0.03;
};

DataKnobs read_data_knobs(Knobs& k) {
    DataKnobs d;
    d.n = k.count("n", d.n, 2);
    d.sigma = k.real("sigma", d.sigma);
    return d;
}

/// Generated and min-max normalized sample data together with its sidecar.
struct Sample {
    Dataset data;
    DatasetMeta meta;
};

Sample make_sample(SampleKind kind, const DataKnobs& dk, std::uint64_t seed, std::vector<double> coeffs = {}) {
    GeneratorSpec g;
    g.kind = kind;
    g.coeffs = std::move(coeffs);
    g.n = dk.n;
    g.noise_sigma = dk.sigma;
    g.seed = seed;
    Dataset data = minmax_normalize(generate(g));
    DatasetMeta meta = describe(g, data);
    return {std::move(data), std::move(meta)};
}

struct FitRow {
    std::string solver;
    FitResult fit;
    double rmse = 0.0;
    std::optional<double> energy;
};

std::vector<FitRow> fit_all(const NormalSystem& sys, const FixedPointFormat& fmt, const Dataset& data,
                            const Solvers& s) {
    std::vector<FitRow> rows;
    const FitResult classical = solve_classical(sys);
    rows.push_back({"classical", classical, rmse(classical, data), std::nullopt});
    for (const auto& [label, config] :
         {std::pair{std::string("tabu"), s.tabu}, std::pair{s.annealer_label, s.annealer}}) {
        QuboFit qf = solve_fit_detailed(sys, fmt, config);
        const double r = rmse(qf.fit, data);
        rows.push_back({label, std::move(qf.fit), r, qf.solve->energy});
    }
    return rows;
}

std::string fixed_count(std::size_t v) { return std::to_string(v); }

std::string basis_axis_label(std::size_t j) { return "c" + std::to_string(j); }

/// Wide table: solver, c0.., ape_c0.. (against classical), rmse, energy.
io::CsvTable coefficient_table(const std::vector<FitRow>& rows) {
    const auto m = static_cast<std::size_t>(rows.front().fit.coefficients.size());
    io::CsvTable t;
    t.header.push_back("solver");
    for (std::size_t j = 0; j < m; ++j) {
        t.header.push_back(basis_axis_label(j));
    }
    for (std::size_t j = 0; j < m; ++j) {
        t.header.push_back("ape_" + basis_axis_label(j));
    }
    t.header.push_back("rmse");
    t.header.push_back("energy");
    const auto& ref = rows.front().fit.coefficients;
    for (const auto& row : rows) {
        std::vector<std::string> cells{row.solver};
        for (std::size_t j = 0; j < m; ++j) {
            cells.push_back(number(row.fit.coefficients[static_cast<Eigen::Index>(j)]));
        }
        for (std::size_t j = 0; j < m; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            cells.push_back(row.energy ? number(ape(ref[jj], row.fit.coefficients[jj])) : "");
        }
        cells.push_back(number(row.rmse));
        cells.push_back(row.energy ? number(*row.energy) : "");
        t.add(std::move(cells));
    }
    return t;
}

/// Long table of every coefficient: key columns, solver, j, c.
void add_coefficients(io::CsvTable& t, const std::vector<std::string>& key, const std::vector<FitRow>& rows) {
    for (const auto& row : rows) {
        for (Eigen::Index j = 0; j < row.fit.coefficients.size(); ++j) {
            std::vector<std::string> cells = key;
            cells.push_back(row.solver);
            cells.push_back(std::to_string(j));
            cells.push_back(number(row.fit.coefficients[j]));
            t.add(std::move(cells));
        }
    }
}

BasisSet make_basis(BasisKind kind, std::size_t m, const Dataset& data) {
    if (kind == BasisKind::Triangular) {
        return BasisSet::triangular_uniform(data.x_min(), data.x_max(), m);
    }
    return BasisSet::chebyshev(m);
}

struct Context {
    const ExperimentSpec& spec;
    Knobs& knobs;
    Output& out;
    json details = json::object();
};

void run_coefficient_table(Context& ctx, SampleKind kind, std::vector<double> coeffs, BasisKind basis_kind,
                           std::size_t m_default, int d_default, int p_default) {
    const DataKnobs dk = read_data_knobs(ctx.knobs);
    const std::size_t m = ctx.knobs.count("m", m_default, basis_kind == BasisKind::Triangular ? 2 : 1);
    const int d = static_cast<int>(ctx.knobs.count("d", static_cast<std::size_t>(d_default)));
    const int p = static_cast<int>(ctx.knobs.count("p", static_cast<std::size_t>(p_default), 0));
    if (kind == SampleKind::CustomPolynomial) {
        coeffs = ctx.knobs.reals("coeffs", coeffs);
    }
    const Solvers solvers = read_solvers(ctx.knobs, ctx.spec, ctx.spec.seed);
    ctx.knobs.finish();
    const FixedPointFormat fmt(d, p);

    const Sample sample = make_sample(kind, dk, ctx.spec.seed, coeffs);
    const NormalSystem sys = assemble(sample.data, make_basis(basis_kind, m, sample.data));
    const auto rows = fit_all(sys, fmt, sample.data, solvers);

    ctx.out.write(std::string(to_string(ctx.spec.name)) + ".csv", coefficient_table(rows).str());
    ctx.out.write("data.csv", io::dataset_csv(sample.data));
    ctx.details["dataset"] = io::to_json(sample.meta);
    ctx.details["basis"] = to_string(basis_kind);
    ctx.details["m"] = m;
    ctx.details["format"] = {{"d", d}, {"p", p}};
    ctx.details["solvers"] = solvers_json(solvers);
}

void run_table3(Context& ctx) {
    const double sigma = ctx.knobs.real("sigma", 0.03);
    const auto ns = ctx.knobs.counts("ns", {64, 128, 256, 512, 1024}, 2);
    const std::size_t m = ctx.knobs.count("m", 2, 2);
    const int d = static_cast<int>(ctx.knobs.count("d", 10));
    const int p = static_cast<int>(ctx.knobs.count("p", 8, 0));
    const Solvers solvers = read_solvers(ctx.knobs, ctx.spec, ctx.spec.seed);
    ctx.knobs.finish();
    const FixedPointFormat fmt(d, p);

    io::CsvTable table{{"n", "rmse_classical", "rmse_tabu", "rmse_anneal", "ape_tabu", "ape_anneal"}, {}};
    io::CsvTable coeffs{{"n", "solver", "j", "c"}, {}};
    json datasets = json::array();
    for (const std::size_t n : ns) {
        const Sample sample = make_sample(SampleKind::Linear, {n, sigma}, ctx.spec.seed);
        const NormalSystem sys = assemble(sample.data, make_basis(BasisKind::Triangular, m, sample.data));
        const auto rows = fit_all(sys, fmt, sample.data, solvers);
        table.add({fixed_count(n), number(rows[0].rmse), number(rows[1].rmse), number(rows[2].rmse),
                   number(ape(rows[0].rmse, rows[1].rmse)), number(ape(rows[0].rmse, rows[2].rmse))});
        add_coefficients(coeffs, {fixed_count(n)}, rows);
        ctx.out.write("data_n" + fixed_count(n) + ".csv", io::dataset_csv(sample.data));
        datasets.push_back(io::to_json(sample.meta));
    }
    ctx.out.write("table3.csv", table.str());
    ctx.out.write("table3_coefficients.csv", coeffs.str());
    ctx.details["datasets"] = datasets;
    ctx.details["m"] = m;
    ctx.details["format"] = {{"d", d}, {"p", p}};
    ctx.details["solvers"] = solvers_json(solvers);
}

void run_d_sweep(Context& ctx, BasisKind basis_kind) {
    const DataKnobs dk = read_data_knobs(ctx.knobs);
    const SampleKind kind = sample_kind_from_string(ctx.knobs.text("data", "cubic"));
    const std::size_t m = ctx.knobs.count("m", 4, basis_kind == BasisKind::Triangular ? 2 : 1);
    const std::size_t d_min = ctx.knobs.count("d_min", 4);
    const std::size_t d_max = ctx.knobs.count("d_max", 12);
    if (d_min > d_max) {
        throw ValidationError("d_min must not exceed d_max");
    }
    const Solvers solvers = read_solvers(ctx.knobs, ctx.spec, ctx.spec.seed);
    ctx.knobs.finish();

    const Sample sample = make_sample(kind, dk, ctx.spec.seed);
    const NormalSystem sys = assemble(sample.data, make_basis(basis_kind, m, sample.data));
    const std::string name = to_string(ctx.spec.name);
    io::CsvTable table{{"d", "p", "rmse_classical", "rmse_tabu", "rmse_anneal"}, {}};
    io::CsvTable coeffs{{"d", "solver", "j", "c"}, {}};
    for (std::size_t d = d_min; d <= d_max; ++d) {
        const FixedPointFormat fmt(static_cast<int>(d), static_cast<int>(d) - 1);
        const auto rows = fit_all(sys, fmt, sample.data, solvers);
        table.add({fixed_count(d), fixed_count(d - 1), number(rows[0].rmse), number(rows[1].rmse),
                   number(rows[2].rmse)});
        add_coefficients(coeffs, {fixed_count(d)}, rows);
    }
    ctx.out.write(name + ".csv", table.str());
    ctx.out.write(name + "_coefficients.csv", coeffs.str());
    ctx.out.write("data.csv", io::dataset_csv(sample.data));
    ctx.details["dataset"] = io::to_json(sample.meta);
    ctx.details["basis"] = to_string(basis_kind);
    ctx.details["m"] = m;
    ctx.details["solvers"] = solvers_json(solvers);
}

void run_m_sweep(Context& ctx) {
    const DataKnobs dk = read_data_knobs(ctx.knobs);
    const auto kinds = ctx.knobs.texts("data", {"trigonometric", "quadratic"});
    const std::size_t m_min = ctx.knobs.count("m_min", 2, 2);
    const std::size_t m_max = ctx.knobs.count("m_max", 14, 2);
    const int d = static_cast<int>(ctx.knobs.count("d", 8));
    const int p = static_cast<int>(ctx.knobs.count("p", 7, 0));
    if (m_min > m_max) {
        throw ValidationError("m_min must not exceed m_max");
    }
    const Solvers solvers = read_solvers(ctx.knobs, ctx.spec, ctx.spec.seed);
    ctx.knobs.finish();
    const FixedPointFormat fmt(d, p);

    io::CsvTable table{{"data", "m", "rmse_classical", "rmse_tabu", "rmse_anneal"}, {}};
    io::CsvTable coeffs{{"data", "m", "solver", "j", "c"}, {}};
    json datasets = json::array();
    for (const auto& kind_name : kinds) {
        const SampleKind kind = sample_kind_from_string(kind_name);
        const Sample sample = make_sample(kind, dk, ctx.spec.seed);
        const std::string label = to_string(kind);
        for (std::size_t m = m_min; m <= m_max; ++m) {
            const NormalSystem sys = assemble(sample.data, make_basis(BasisKind::Triangular, m, sample.data));
            const auto rows = fit_all(sys, fmt, sample.data, solvers);
            table.add({label, fixed_count(m), number(rows[0].rmse), number(rows[1].rmse), number(rows[2].rmse)});
            add_coefficients(coeffs, {label, fixed_count(m)}, rows);
        }
        ctx.out.write("data_" + label + ".csv", io::dataset_csv(sample.data));
        datasets.push_back(io::to_json(sample.meta));
    }
    ctx.out.write("fig_m_sweep.csv", table.str());
    ctx.out.write("fig_m_sweep_coefficients.csv", coeffs.str());
    ctx.details["datasets"] = datasets;
    ctx.details["format"] = {{"d", d}, {"p", p}};
    ctx.details["solvers"] = solvers_json(solvers);
}

/// Largest |block(row) - block(col)| over nonzero entries, blocks of size d.
std::size_t block_bandwidth(const QuboProblem& q) {
    std::size_t width = 0;
    const auto d = static_cast<Eigen::Index>(q.fmt.digits());
    for (Eigen::Index i = 0; i < q.Q.rows(); ++i) {
        for (Eigen::Index j = 0; j < q.Q.cols(); ++j) {
            if (q.Q(i, j) != 0.0) {
                const auto a = i / d;
                const auto b = j / d;
                width = std::max(width, static_cast<std::size_t>(a > b ? a - b : b - a));
            }
        }
    }
    return width;
}

void run_heatmap(Context& ctx) {
    const DataKnobs dk = read_data_knobs(ctx.knobs);
    const SampleKind kind = sample_kind_from_string(ctx.knobs.text("data", "cubic"));
    const std::size_t m_tri = ctx.knobs.count("m_triangular", 8, 2);
    const std::size_t m_cheb = ctx.knobs.count("m_chebyshev", 4);
    const int d = static_cast<int>(ctx.knobs.count("d", 8));
    const int p = static_cast<int>(ctx.knobs.count("p", static_cast<std::size_t>(d - 1), 0));
    ctx.knobs.finish();
    const FixedPointFormat fmt(d, p);

    const Sample sample = make_sample(kind, dk, ctx.spec.seed);
    io::CsvTable summary{{"basis", "m", "d", "p", "size", "density", "block_bandwidth"}, {}};
    json densities = json::object();
    for (const auto& [basis_kind, m] : {std::pair{BasisKind::Triangular, m_tri}, std::pair{BasisKind::Chebyshev, m_cheb}}) {
        const NormalSystem sys = assemble(sample.data, make_basis(basis_kind, m, sample.data));
        const QuboProblem q = build_qubo(sys, fmt);
        const std::string label = to_string(basis_kind);
        ctx.out.write("qubo_heatmap_" + label + ".csv", io::qubo_heatmap_csv(q));
        const double dens = density(q);
        summary.add({label, fixed_count(m), std::to_string(d), std::to_string(p), fixed_count(q.size()),
                     number(dens), fixed_count(block_bandwidth(q))});
        densities[label] = dens;
    }
    ctx.out.write("qubo_heatmap.csv", summary.str());
    ctx.out.write("data.csv", io::dataset_csv(sample.data));
    ctx.details["dataset"] = io::to_json(sample.meta);
    ctx.details["density"] = densities;
}

/// Scenario keys of the override object layered over the defaults.
JitScenario read_scenario(Knobs& k, std::uint64_t seed) {
    json j = json::object();
    for (const char* key : {"ell", "v_max", "T", "alpha", "x0", "n_states", "grid_actions", "n_actions",
                            "n_samples", "m", "d", "p"}) {
        if (k.has(key)) {
            j[key] = k.raw(key);
        }
    }
    j["seed"] = seed;
    return io::scenario_from_json(j);
}

std::vector<std::string> policy_cells(const std::string& strategy, const Policy& policy) {
    std::vector<std::string> cells{strategy};
    for (const double u : policy.actions) {
        cells.push_back(number(u));
    }
    cells.push_back(number(policy.total_cost));
    return cells;
}

void run_table4(Context& ctx) {
    const JitScenario sc = read_scenario(ctx.knobs, ctx.spec.seed);
    const Solvers solvers = read_solvers(ctx.knobs, ctx.spec, sc.seed);
    const std::size_t curve_points = ctx.knobs.count("curve_points", 101, 2);
    ctx.knobs.finish();

    const JitParams params = sc.params();
    const MdpSpec mdp = make_jit_mdp(params, sc.horizon);
    const BasisSet basis = BasisSet::triangular_uniform(mdp.states.lo, mdp.states.hi, sc.m);
    const FixedPointFormat fmt(sc.d, sc.p);

    const Policy analytic = analytic_jit_policy(params, sc.horizon, sc.x0);
    const ValueTable grid = value_iteration_grid(mdp, sc.n_states, sc.grid_actions);
    const Policy grid_policy = extract_policy(mdp, grid, sc.x0, sc.grid_actions);

    struct Fitted {
        std::string strategy;
        FittedValue value;
        Policy policy;
    };
    std::vector<Fitted> fitted;
    SolverConfig classical;
    for (const auto& [strategy, config] : {std::pair{std::string("inverse"), classical},
                                           std::pair{std::string("tabu"), solvers.tabu},
                                           std::pair{solvers.annealer_label, solvers.annealer}}) {
        FittedValue value = fitted_value_iteration(mdp, basis, fmt, config, sc.n_samples, sc.n_actions);
        Policy policy = extract_policy(mdp, value, sc.x0, sc.n_actions);
        fitted.push_back({strategy, std::move(value), std::move(policy)});
    }

    io::CsvTable table;
    table.header.push_back("strategy");
    for (int t = 0; t < sc.horizon; ++t) {
        table.header.push_back("u" + std::to_string(t));
    }
    table.header.push_back("V0");
    table.add(policy_cells("analytic", analytic));
    table.add(policy_cells("grid", grid_policy));
    for (const auto& f : fitted) {
        table.add(policy_cells(f.strategy, f.policy));
    }

    const auto reference = [&](int t, double x) { return jit_reference_value(params, sc.horizon, t, x); };
    io::CsvTable curves;
    curves.header = {"t", "x", "reference", "grid"};
    for (const auto& f : fitted) {
        curves.header.push_back(f.strategy);
    }
    io::CsvTable errors{{"strategy", "t", "mse"}, {}};
    for (int t = 0; t <= sc.horizon; ++t) {
        for (const double x : linspace(mdp.states.lo, mdp.states.hi, curve_points)) {
            std::vector<std::string> cells{std::to_string(t), number(x), number(reference(t, x)),
                                           number(grid.at(t, x))};
            for (const auto& f : fitted) {
                cells.push_back(number(f.value.eval(t, x)));
            }
            curves.add(std::move(cells));
        }
        errors.add({"grid", std::to_string(t), number(value_table_error(grid, reference, t))});
        for (const auto& f : fitted) {
            errors.add({f.strategy, std::to_string(t), number(value_function_error(f.value, reference, mdp.states, t))});
        }
    }

    io::CsvTable states{{"strategy", "t", "x"}, {}};
    auto add_states = [&](const std::string& strategy, const Policy& policy) {
        for (std::size_t t = 0; t < policy.states.size(); ++t) {
            states.add({strategy, std::to_string(t), number(policy.states[t])});
        }
    };
    add_states("analytic", analytic);
    add_states("grid", grid_policy);
    for (const auto& f : fitted) {
        add_states(f.strategy, f.policy);
    }

    ctx.out.write("table4.csv", table.str());
    ctx.out.write("table4_states.csv", states.str());
    ctx.out.write("table4_values.csv", curves.str());
    ctx.out.write("table4_errors.csv", errors.str());
    json scenario = io::to_json(sc);
    scenario.erase("backend");
    ctx.details["scenario"] = scenario;
    ctx.details["grid_V0_table"] = grid.at(0, sc.x0);
    ctx.details["solvers"] = solvers_json(solvers);
}

void run_value_mse(Context& ctx) {
    const auto alphas = ctx.knobs.reals("alphas", {10.0, 100.0, 1000.0});
    const auto ns = ctx.knobs.counts("ns", {10, 20, 30, 50, 100, 200}, 2);
    const auto ms = ctx.knobs.counts("ms", {3, 4, 6, 8, 9, 12, 16}, 2);
    const std::size_t n_fixed = ctx.knobs.count("n_samples", 50, 2);
    const std::size_t m_fixed = ctx.knobs.count("m", 9, 2);
    const JitScenario base = read_scenario(ctx.knobs, ctx.spec.seed);
    ctx.knobs.finish();
    for (const std::size_t n : ns) {
        if (n < m_fixed) {
            throw ValidationError("every n in ns must be >= m");
        }
    }
    for (const std::size_t m : ms) {
        if (m > n_fixed) {
            throw ValidationError("every m in ms must be <= n_samples");
        }
    }

    const FixedPointFormat fmt(base.d, base.p);
    const SolverConfig classical;
    io::CsvTable table{{"sweep", "alpha", "n", "m", "mse_fitted", "mse_grid"}, {}};
    for (const double alpha : alphas) {
        JitParams params = base.params();
        params.alpha = alpha;
        const MdpSpec mdp = make_jit_mdp(params, base.horizon);
        const auto reference = [&](int t, double x) { return jit_reference_value(params, base.horizon, t, x); };
        auto run = [&](const std::string& sweep, std::size_t n, std::size_t m) {
            const BasisSet basis = BasisSet::triangular_uniform(mdp.states.lo, mdp.states.hi, m);
            const FittedValue value = fitted_value_iteration(mdp, basis, fmt, classical, n, base.n_actions);
            const ValueTable grid = value_iteration_grid(mdp, n, base.grid_actions);
            table.add({sweep, number(alpha), fixed_count(n), fixed_count(m),
                       number(value_function_error(value, reference, mdp.states)),
                       number(value_table_error(grid, reference))});
        };
        for (const std::size_t n : ns) {
            run("n", n, m_fixed);
        }
        for (const std::size_t m : ms) {
            run("m", n_fixed, m);
        }
    }
    ctx.out.write("fig_value_mse.csv", table.str());
    json scenario = io::to_json(base);
    scenario.erase("backend");
    ctx.details["scenario"] = scenario;
}

void run_m_error(Context& ctx) {
    const auto ds = ctx.knobs.counts("ds", {7, 9}, 1);
    const auto ms = ctx.knobs.counts("ms", {3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, 2);
    const JitScenario sc = read_scenario(ctx.knobs, ctx.spec.seed);
    const Solvers solvers = read_solvers(ctx.knobs, ctx.spec, sc.seed);
    ctx.knobs.finish();
    for (const std::size_t m : ms) {
        if (m > sc.n_samples) {
            throw ValidationError("every m in ms must be <= n_samples");
        }
    }

    const JitParams params = sc.params();
    const MdpSpec mdp = make_jit_mdp(params, sc.horizon);
    const auto reference = [&](int t, double x) { return jit_reference_value(params, sc.horizon, t, x); };
    io::CsvTable table{{"d", "p", "m", "solver", "mse_t0", "mse_avg"}, {}};
    const SolverConfig classical;
    for (const std::size_t d : ds) {
        const FixedPointFormat fmt(static_cast<int>(d), static_cast<int>(d) - 1);
        for (const std::size_t m : ms) {
            const BasisSet basis = BasisSet::triangular_uniform(mdp.states.lo, mdp.states.hi, m);
            for (const auto& [label, config] : {std::pair{std::string("classical"), classical},
                                                std::pair{std::string("tabu"), solvers.tabu},
                                                std::pair{solvers.annealer_label, solvers.annealer}}) {
                const FittedValue value = fitted_value_iteration(mdp, basis, fmt, config, sc.n_samples, sc.n_actions);
                table.add({fixed_count(d), fixed_count(d - 1), fixed_count(m), label,
                           number(value_function_error(value, reference, mdp.states, 0)),
                           number(value_function_error(value, reference, mdp.states))});
            }
        }
    }
    ctx.out.write("fig_m_error.csv", table.str());
    json scenario = io::to_json(sc);
    scenario.erase("backend");
    ctx.details["scenario"] = scenario;
    ctx.details["solvers"] = solvers_json(solvers);
}

void dispatch(Context& ctx) {
    switch (ctx.spec.name) {
        case Experiment::Table1:
            return run_coefficient_table(ctx, SampleKind::Linear, {}, BasisKind::Triangular, 2, 10, 8);
        case Experiment::Table2:
            return run_coefficient_table(ctx, SampleKind::CustomPolynomial, {1.0 / 3.0, -0.25},
                                         BasisKind::Triangular, 2, 10, 8);
        case Experiment::Table3: return run_table3(ctx);
        case Experiment::FigDSweep: return run_d_sweep(ctx, BasisKind::Triangular);
        case Experiment::FigMSweep: return run_m_sweep(ctx);
        case Experiment::ChebyshevTable:
            return run_coefficient_table(ctx, SampleKind::Quadratic, {}, BasisKind::Chebyshev, 3, 8, 7);
        case Experiment::ChebyshevDSweep: return run_d_sweep(ctx, BasisKind::Chebyshev);
        case Experiment::QuboHeatmap: return run_heatmap(ctx);
        case Experiment::Table4: return run_table4(ctx);
        case Experiment::FigValueMse: return run_value_mse(ctx);
        case Experiment::FigMError: return run_m_error(ctx);
    }
}

}  // namespace

const char* to_string(Experiment e) noexcept {
    for (const auto& entry : kExperiments) {
        if (entry.id == e) {
            return entry.name;
        }
    }
    return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
    for (const auto& entry : kExperiments) {
        if (name == entry.name) {
            return entry.id;
        }
    }
    throw ValidationError("unknown experiment '" + name + "'");
}

const std::vector<Experiment>& all_experiments() {
    static const std::vector<Experiment> all = [] {
        std::vector<Experiment> v;
        for (const auto& entry : kExperiments) {
            v.push_back(entry.id);
        }
        return v;
    }();
    return all;
}

std::string version_string() { return QUBOFIT_DESCRIBE; }

std::string qubo_heatmap_data(BasisKind kind, std::size_t m, const FixedPointFormat& fmt, const Dataset& data) {
    return io::qubo_heatmap_csv(build_qubo(assemble(data, make_basis(kind, m, data)), fmt));
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
    const auto start = std::chrono::steady_clock::now();
    const std::string name = to_string(spec.name);
    Knobs knobs(spec.overrides);
    Output out(spec.output_dir, name);
    Context ctx{spec, knobs, out};
    dispatch(ctx);

    ExperimentReport report;
    json spec_json{{"name", name}, {"seed", spec.seed}, {"overrides", spec.overrides}};
    if (!spec.external_command.empty()) {
        spec_json["external_command"] = spec.external_command;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.manifest = json{{"spec", spec_json},
                           {"version", version_string()},
                           {"wall_time_s", wall},
                           {"noise_generator", kNoiseGenerator},
                           {"details", ctx.details}};
    out.write("manifest.json", report.manifest.dump(2) + "\n");
    report.files = out.commit();
    return report;
}

}  // namespace qubofit

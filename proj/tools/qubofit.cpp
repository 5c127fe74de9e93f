// qubofit command-line tool.
//
// Exit codes: 0 success, 1 other failure, 2 invalid input, 3 external sampler failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qubofit/data.hpp"
#include "qubofit/dynprog.hpp"
#include "qubofit/errors.hpp"
#include "qubofit/harness.hpp"
#include "qubofit/io.hpp"
#include "qubofit/solvers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qubofit;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitExternal = 3;

struct SolverOptions {
    std::string backend = "classical";
    std::uint64_t seed = 42;
    std::optional<std::size_t> restarts;
    std::optional<std::size_t> iterations;
    std::optional<std::size_t> tenure;
    std::string sampler;
};

void add_solver_options(CLI::App* cmd, SolverOptions& o, bool allow_classical) {
    std::vector<std::string> choices{"brute", "tabu", "anneal", "external"};
    if (allow_classical) {
        choices.insert(choices.begin(), "classical");
    } else {
        o.backend = "tabu";
    }
    cmd->add_option("--backend", o.backend, "Solver backend")->check(CLI::IsMember(choices))->capture_default_str();
    cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    cmd->add_option("--restarts", o.restarts, "Restarts (tabu, anneal)");
    cmd->add_option("--iterations", o.iterations, "Iterations or sweeps per restart (tabu, anneal)");
    cmd->add_option("--tenure", o.tenure, "Tabu tenure");
    cmd->add_option("--sampler", o.sampler, "External sampler command (backend external)");
}

SolverConfig solver_config(const SolverOptions& o) {
    SolverConfig c;
    c.backend = backend_from_string(o.backend);
    c.params = c.backend == Backend::Annealing ? SolverParams::anneal_defaults(o.seed)
                                               : SolverParams::tabu_defaults(o.seed);
    if (o.restarts) {
        c.params.restarts = *o.restarts;
    }
    if (o.iterations) {
        c.params.iterations_per_restart = *o.iterations;
    }
    c.params.tabu_tenure = o.tenure;
    c.params.validate();
    c.external_command = o.sampler;
    if (c.backend == Backend::External && c.external_command.empty()) {
        throw ValidationError("--backend external needs --sampler");
    }
    return c;
}

/// Writes to `out`, or to stdout when `out` is empty.
void emit(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
    } else {
        io::write_text(out, text);
    }
}

json read_json(const fs::path& path) {
    try {
        return json::parse(io::read_text(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

struct FitOptions {
    std::string data;
    std::string basis = "triangular";
    std::size_t m = 2;
    int d = 10;
    int p = 8;
    bool normalize = false;
    std::string out;
};

void add_fit_options(CLI::App* cmd, FitOptions& o) {
    cmd->add_option("--data", o.data, "Dataset CSV with header x,y")->required()->check(CLI::ExistingFile);
    cmd->add_option("--basis", o.basis, "triangular or chebyshev")
        ->check(CLI::IsMember({"triangular", "chebyshev"}))
        ->capture_default_str();
    cmd->add_option("-m,--m", o.m, "Number of basis functions")->capture_default_str();
    cmd->add_option("-d,--digits", o.d, "Binary digits per coefficient")->capture_default_str();
    cmd->add_option("-p,--point", o.p, "Fractional digits per coefficient")->capture_default_str();
    cmd->add_flag("--normalize", o.normalize, "Min-max normalize the ordinates first");
    cmd->add_option("--out", o.out, "Output file (default stdout)");
}

NormalSystem load_system(const FitOptions& o) {
    Dataset data = io::read_dataset_csv(o.data);
    if (o.normalize) {
        data = minmax_normalize(data);
    }
    const BasisSet basis = basis_kind_from_string(o.basis) == BasisKind::Triangular
                               ? BasisSet::triangular_uniform(data.x_min(), data.x_max(), o.m)
                               : BasisSet::chebyshev(o.m);
    return assemble(data, basis);
}

int run(int argc, char** argv) {
    CLI::App app{"Least-squares curve fitting through QUBO formulations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());

    // generate
    std::string kind = "linear";
    std::vector<double> coeffs;
    GeneratorSpec gen;
    gen.seed = 42;
    bool gen_normalize = false;
    std::string gen_out;
    auto* generate_cmd = app.add_subcommand("generate", "Generate a noisy sample dataset");
    generate_cmd->add_option("--kind", kind, "linear, quadratic, cubic, trigonometric or custom")
        ->check(CLI::IsMember({"linear", "quadratic", "cubic", "trigonometric", "custom"}))
        ->capture_default_str();
    generate_cmd->add_option("--coeffs", coeffs, "Custom polynomial coefficients, ascending powers")->delimiter(',');
    generate_cmd->add_option("-n,--n", gen.n, "Number of samples")->capture_default_str();
    generate_cmd->add_option("--sigma", gen.noise_sigma, "Noise standard deviation")->capture_default_str();
    generate_cmd->add_option("--seed", gen.seed, "Noise seed")->capture_default_str();
    generate_cmd->add_flag("--normalize", gen_normalize, "Min-max normalize the ordinates");
    generate_cmd->add_option("--out", gen_out, "CSV output (a .meta.json sidecar is written next to it)");

    // fit
    FitOptions fit_opts;
    SolverOptions fit_solver;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a dataset classically or through a QUBO");
    add_fit_options(fit_cmd, fit_opts);
    add_solver_options(fit_cmd, fit_solver, true);

    // qubo
    FitOptions qubo_opts;
    std::string heatmap_out;
    auto* qubo_cmd = app.add_subcommand("qubo", "Export the QUBO of a fit as JSON");
    add_fit_options(qubo_cmd, qubo_opts);
    qubo_cmd->add_option("--heatmap", heatmap_out, "Also write row,col,value CSV of the upper triangle");

    // solve
    std::string qubo_in;
    std::string solve_out;
    SolverOptions solve_solver;
    auto* solve_cmd = app.add_subcommand("solve", "Minimize an exported QUBO");
    solve_cmd->add_option("--qubo", qubo_in, "QUBO JSON")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--out", solve_out, "Output file (default stdout)");
    add_solver_options(solve_cmd, solve_solver, false);

    // dp
    std::string dp_config;
    std::string dp_out = ".";
    std::optional<std::string> dp_backend;
    std::optional<std::uint64_t> dp_seed;
    bool dp_grid = false;
    std::string dp_sampler;
    auto* dp_cmd = app.add_subcommand("dp", "Solve the just-in-time arrival problem");
    dp_cmd->add_option("--config", dp_config, "Scenario JSON")->check(CLI::ExistingFile);
    dp_cmd->add_option("--backend", dp_backend, "Overrides the scenario backend")
        ->check(CLI::IsMember({"classical", "brute", "tabu", "anneal", "external"}));
    dp_cmd->add_option("--seed", dp_seed, "Overrides the scenario seed");
    dp_cmd->add_flag("--grid", dp_grid, "Grid value iteration instead of fitted value iteration");
    dp_cmd->add_option("--sampler", dp_sampler, "External sampler command (backend external)");
    dp_cmd->add_option("--out", dp_out, "Output directory")->capture_default_str();

    // experiment
    std::vector<std::string> names;
    ExperimentSpec exp;
    std::string exp_config;
    std::vector<std::string> exp_set;
    std::string exp_out = "results";
    auto* exp_cmd = app.add_subcommand("experiment", "Run named experiments, or 'all'");
    exp_cmd->add_option("names", names, "Experiment names")->required();
    exp_cmd->add_option("--seed", exp.seed, "Master seed")->capture_default_str();
    exp_cmd->add_option("--config", exp_config, "JSON object of overrides")->check(CLI::ExistingFile);
    exp_cmd->add_option("--set", exp_set, "Override as key=value (value parsed as JSON when possible)");
    std::string exp_backend = "anneal";
    exp_cmd->add_option("--backend", exp_backend, "Annealer column source: anneal or external")
        ->check(CLI::IsMember({"anneal", "external"}))
        ->capture_default_str();
    exp_cmd->add_option("--sampler", exp.external_command, "External sampler command");
    exp_cmd->add_option("--out", exp_out, "Output directory (one subdirectory per experiment)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    if (*generate_cmd) {
        gen.kind = sample_kind_from_string(kind);
        gen.coeffs = coeffs;
        Dataset data = generate(gen);
        if (gen_normalize) {
            data = minmax_normalize(data);
        }
        emit(gen_out, io::dataset_csv(data));
        if (!gen_out.empty()) {
            fs::path meta = gen_out;
            meta.replace_extension(".meta.json");
            io::write_text(meta, io::to_json(describe(gen, data)).dump(2) + "\n");
        }
    } else if (*fit_cmd) {
        const SolverConfig config = solver_config(fit_solver);
        const FixedPointFormat fmt(fit_opts.d, fit_opts.p);
        const NormalSystem sys = load_system(fit_opts);
        const QuboFit result = solve_fit_detailed(sys, fmt, config);
        json j = io::to_json(result.fit);
        j["backend"] = to_string(config.backend);
        if (result.solve) {
            j["format"] = {{"d", fmt.digits()}, {"p", fmt.point()}};
            j["solve"] = io::to_json(*result.solve);
        }
        emit(fit_opts.out, j.dump(2) + "\n");
    } else if (*qubo_cmd) {
        const NormalSystem sys = load_system(qubo_opts);
        const QuboProblem q = build_qubo(sys, FixedPointFormat(qubo_opts.d, qubo_opts.p));
        emit(qubo_opts.out, io::qubo_to_json(q).dump(2) + "\n");
        if (!heatmap_out.empty()) {
            io::write_text(heatmap_out, io::qubo_heatmap_csv(q));
        }
    } else if (*solve_cmd) {
        const SolverConfig config = solver_config(solve_solver);
        const QuboProblem q = io::qubo_from_json(read_json(qubo_in));
        const SolveResult r = solve_qubo(q, config);
        json j = io::to_json(r);
        if (q.m > 0 && q.size() == q.m * static_cast<std::size_t>(q.fmt.digits())) {
            j["coefficients"] = decode_bits(r.bits, q.fmt, q.m);
        }
        emit(solve_out, j.dump(2) + "\n");
    } else if (*dp_cmd) {
        json scenario_json = dp_config.empty() ? json::object() : read_json(dp_config);
        if (dp_backend) {
            scenario_json["backend"] = *dp_backend;
        }
        if (dp_seed) {
            scenario_json["seed"] = *dp_seed;
        }
        const JitScenario sc = io::scenario_from_json(scenario_json);
        const JitParams params = sc.params();
        const MdpSpec mdp = make_jit_mdp(params, sc.horizon);

        Policy policy;
        std::function<double(int, double)> value;
        std::optional<ValueTable> table;
        std::optional<FittedValue> fitted;
        std::string strategy;
        if (dp_grid) {
            table = value_iteration_grid(mdp, sc.n_states, sc.grid_actions);
            policy = extract_policy(mdp, *table, sc.x0, sc.grid_actions);
            value = [&](int t, double x) { return table->at(t, x); };
            strategy = "grid";
        } else {
            SolverConfig config;
            config.backend = sc.backend;
            config.params = sc.backend == Backend::Annealing ? SolverParams::anneal_defaults(sc.seed)
                                                             : SolverParams::tabu_defaults(sc.seed);
            config.external_command = dp_sampler;
            if (config.backend == Backend::External && config.external_command.empty()) {
                throw ValidationError("backend external needs --sampler");
            }
            const BasisSet basis = BasisSet::triangular_uniform(mdp.states.lo, mdp.states.hi, sc.m);
            fitted = fitted_value_iteration(mdp, basis, FixedPointFormat(sc.d, sc.p), config, sc.n_samples,
                                            sc.n_actions);
            policy = extract_policy(mdp, *fitted, sc.x0, sc.n_actions);
            value = [&](int t, double x) { return fitted->eval(t, x); };
            strategy = std::string("fitted-") + to_string(sc.backend);
        }

        io::CsvTable curves{{"t", "x", "value", "reference"}, {}};
        for (int t = 0; t <= sc.horizon; ++t) {
            for (const double x : linspace(mdp.states.lo, mdp.states.hi, 101)) {
                curves.add({std::to_string(t), io::number(x), io::number(value(t, x)),
                            io::number(jit_reference_value(params, sc.horizon, t, x))});
            }
        }
        json j{{"strategy", strategy}, {"scenario", io::to_json(sc)}, {"policy", io::to_json(policy)}};
        fs::create_directories(dp_out);
        io::write_text(fs::path(dp_out) / "policy.json", j.dump(2) + "\n");
        io::write_text(fs::path(dp_out) / "values.csv", curves.str());
        std::cout << j.dump(2) << "\n";
    } else if (*exp_cmd) {
        json overrides = exp_config.empty() ? json::object() : read_json(exp_config);
        if (!overrides.is_object()) {
            throw ValidationError("--config must hold a JSON object");
        }
        for (const auto& kv : exp_set) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw ValidationError("--set expects key=value, got '" + kv + "'");
            }
            const std::string key = kv.substr(0, eq);
            const std::string text = kv.substr(eq + 1);
            json v = json::parse(text, nullptr, false);
            overrides[key] = v.is_discarded() ? json(text) : v;
        }
        if (exp_backend == "external" && exp.external_command.empty()) {
            throw ValidationError("--backend external needs --sampler");
        }
        if (exp_backend == "anneal") {
            exp.external_command.clear();
        }
        std::vector<Experiment> todo;
        for (const auto& name : names) {
            if (name == "all") {
                todo.insert(todo.end(), all_experiments().begin(), all_experiments().end());
            } else {
                todo.push_back(experiment_from_string(name));
            }
        }
        exp.overrides = overrides;
        for (const Experiment e : todo) {
            exp.name = e;
            exp.output_dir = fs::path(exp_out) / to_string(e);
            const ExperimentReport report = run_experiment(exp);
            std::cout << to_string(e) << ": " << report.files.size() << " files in " << exp.output_dir.string()
                      << " (" << report.manifest["wall_time_s"].get<double>() << " s)\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ExternalFailure& e) {
        std::cerr << "qubofit: external sampler: " << e.what() << "\n";
        return kExitExternal;
    } catch (const ValidationError& e) {
        std::cerr << "qubofit: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "qubofit: " << e.what() << "\n";
        return kExitFailure;
    }
}

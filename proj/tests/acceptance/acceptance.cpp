// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [output-dir]   (default: a fresh directory under /tmp)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qubofit/data.hpp"
#include "qubofit/dynprog.hpp"
#include "qubofit/encoding.hpp"
#include "qubofit/harness.hpp"
#include "qubofit/io.hpp"
#include "qubofit/solvers.hpp"

using namespace qubofit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Parsed CSV with column lookup by header name.
class Csv {
public:
    explicit Csv(const fs::path& path) {
        std::istringstream is(io::read_text(path));
        std::string line;
        std::getline(is, line);
        header_ = split(line);
        while (std::getline(is, line)) {
            if (!line.empty()) {
                rows_.push_back(split(line));
            }
        }
    }
    std::size_t size() const { return rows_.size(); }
    const std::string& text(std::size_t row, const std::string& col) const { return rows_.at(row).at(index(col)); }
    double num(std::size_t row, const std::string& col) const { return std::stod(text(row, col)); }
    /// First row whose column `col` equals `value`.
    std::size_t find(const std::string& col, const std::string& value) const {
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (text(r, col) == value) {
                return r;
            }
        }
        throw std::runtime_error("no row with " + col + " = " + value);
    }

private:
    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        return cells;
    }
    std::size_t index(const std::string& col) const {
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (header_[i] == col) {
                return i;
            }
        }
        throw std::runtime_error("no column " + col);
    }
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Each experiment runs once into `first`, timed as part of the first criterion that reads it.
class Runs {
public:
    explicit Runs(fs::path root) : root_(std::move(root)) {}
    fs::path dir(Experiment e) {
        const std::string name = to_string(e);
        if (!done_.contains(name)) {
            ExperimentSpec spec;
            spec.name = e;
            spec.output_dir = root_ / "first" / name;
            run_experiment(spec);
            done_.insert(name);
        }
        return root_ / "first" / name;
    }
    const fs::path& root() const { return root_; }

private:
    fs::path root_;
    std::set<std::string> done_;
};

NormalSystem linear_system(std::size_t m) {
    GeneratorSpec g;
    g.kind = SampleKind::Linear;
    g.n = 64;
    g.seed = 42;
    return assemble(minmax_normalize(generate(g)), BasisSet::triangular_uniform(0.0, 1.0, m));
}

Outcome ising_equivalence() {
    std::mt19937_64 rng(1);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 12);
        const QuboProblem q = QuboProblem::from_matrix(oracle::random_symmetric(n, rng));
        const IsingProblem is = to_ising(q);
        std::vector<int> s(n);
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
            const auto z = oracle::bits_of(code, n);
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = 2 * z[i] - 1;
            }
            worst = std::max(worst, std::abs(is.energy(s) + is.offset - oracle::energy(q.Q, z)));
        }
    }
    return {worst <= 1e-9, fmt("max deviation %.3g over 50 QUBOs", worst)};
}

Outcome encoding_correctness() {
    std::size_t values = 0;
    std::size_t bad = 0;
    for (int d = 1; d <= 8; ++d) {
        for (int p = 0; p < d; ++p) {
            const FixedPointFormat f(d, p);
            for (long long k = -(1LL << (d - 1)); k < (1LL << (d - 1)); ++k) {
                const std::vector<double> c{std::ldexp(static_cast<double>(k), -p)};
                const Bits z = encode_coefficients(c, f);
                bad += decode_bits(z, f, 1) != c || oracle::decode_one(z, 0, d, p) != c[0];
                ++values;
            }
        }
    }
    double worst = 0.0;
    std::size_t states = 0;
    for (int d = 1; d <= 6; ++d) {
        for (int p = 0; p < d; ++p) {
            const NormalSystem sys = oracle::random_fit_system(2, static_cast<std::uint64_t>(10 * d + p));
            const FixedPointFormat f(d, p);
            const QuboProblem q = build_qubo(sys, f);
            for (std::uint64_t code = 0; code < (std::uint64_t{1} << (2 * d)); ++code) {
                const auto z = oracle::bits_of(code, static_cast<std::size_t>(2 * d));
                const Eigen::Vector2d c(oracle::decode_one(z, 0, d, p),
                                        oracle::decode_one(z, static_cast<std::size_t>(d), d, p));
                const double ref = objective(sys, c);
                worst = std::max(worst, std::abs(qubo_energy(q, z) - ref) / std::max(1.0, std::abs(ref)));
                ++states;
            }
        }
    }
    return {bad == 0 && worst <= 1e-9,
            fmt("%zu roundtrip failures in %zu values; energy rel. deviation %.3g over %zu states", bad, values,
                worst, states)};
}

Outcome brute_force_quantization() {
    const NormalSystem sys = linear_system(2);
    const FixedPointFormat f(5, 4);
    const FitResult exact = solve_classical(sys);
    const FitResult brute = solve_fit(sys, f, SolverConfig{Backend::BruteForce, {}, {}});
    double gap = 0.0;
    for (Eigen::Index j = 0; j < 2; ++j) {
        gap = std::max(gap, std::abs(brute.coefficients(j) - exact.coefficients(j)));
    }
    return {gap <= f.step(),
            fmt("classical (%.5f, %.5f), brute force (%.4f, %.4f), max gap %.4f vs step %.4f", exact.coefficients(0),
                exact.coefficients(1), brute.coefficients(0), brute.coefficients(1), gap, f.step())};
}

Outcome heuristic_quality() {
    int tabu_hits = 0;
    int anneal_hits = 0;
    int runs = 0;
    const std::pair<std::size_t, int> shapes[] = {{2, 10}, {2, 8}, {3, 6}, {4, 5}, {2, 9}};
    for (int k = 0; k < 10; ++k) {
        const auto [m, d] = shapes[k % 5];
        const NormalSystem sys = oracle::random_fit_system(m, 500 + static_cast<std::uint64_t>(k));
        const QuboProblem q = build_qubo(sys, FixedPointFormat(d, d - 1));
        const double best = brute_force(q).energy;
        const double tol = 1e-9 * std::max(1.0, std::abs(best));
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            tabu_hits += tabu_search(q, SolverParams::tabu_defaults(seed)).energy <= best + tol;
            anneal_hits += simulated_annealing(q, SolverParams::anneal_defaults(seed)).energy <= best + tol;
            ++runs;
        }
    }
    const double tabu_rate = static_cast<double>(tabu_hits) / runs;
    const double anneal_rate = static_cast<double>(anneal_hits) / runs;
    return {tabu_rate >= 0.95 && anneal_rate >= 0.95,
            fmt("optimum reached: tabu %d/%d, annealing %d/%d", tabu_hits, runs, anneal_hits, runs)};
}

Outcome table1(Runs& runs) {
    const Csv t(runs.dir(Experiment::Table1) / "table1.csv");
    const std::size_t c = t.find("solver", "classical");
    const std::size_t q = t.find("solver", "tabu");
    const double c0 = t.num(c, "c0");
    const double c1 = t.num(c, "c1");
    const bool c1_dominant = std::abs(c1) >= std::abs(c0);
    const double ape_big = ape(c1_dominant ? c1 : c0, t.num(q, c1_dominant ? "c1" : "c0"));
    const double ape_small = ape(c1_dominant ? c0 : c1, t.num(q, c1_dominant ? "c0" : "c1"));
    return {ape_big <= 1.0 && ape_small <= 5.0,
            fmt("classical (%.4f, %.4f), tabu (%.4f, %.4f); APE dominant %.3f%%, small %.3f%%", c0, c1,
                t.num(q, "c0"), t.num(q, "c1"), ape_big, ape_small)};
}

Outcome table3(Runs& runs) {
    const Csv t(runs.dir(Experiment::Table3) / "table3.csv");
    bool ok = t.size() == 5;
    std::string detail = "APE(rmse) %:";
    for (std::size_t r = 0; r < t.size(); ++r) {
        const double a = ape(t.num(r, "rmse_classical"), t.num(r, "rmse_tabu"));
        ok = ok && a <= 0.01;
        detail += fmt(" n=%s %.2e", t.text(r, "n").c_str(), a);
    }
    return {ok, detail};
}

Outcome d_sweep(Runs& runs) {
    const Csv t(runs.dir(Experiment::FigDSweep) / "fig_d_sweep.csv");
    double worst = -1.0;
    std::size_t rows = 0;
    for (std::size_t r = 0; r < t.size(); ++r) {
        if (t.num(r, "d") >= 8) {
            worst = std::max(worst, t.num(r, "rmse_tabu") - t.num(r, "rmse_classical"));
            ++rows;
        }
    }
    return {rows == 5 && worst <= 1e-3, fmt("max RMSE(tabu) - RMSE(classical) for d >= 8: %.3g", worst)};
}

Outcome m_sweep(Runs& runs) {
    const Csv t(runs.dir(Experiment::FigMSweep) / "fig_m_sweep.csv");
    double r4 = NAN;
    double r12 = NAN;
    double worst = 0.0;
    int worst_m = 0;
    for (std::size_t r = 0; r < t.size(); ++r) {
        if (t.text(r, "data") != "trigonometric") {
            continue;
        }
        const int m = static_cast<int>(t.num(r, "m"));
        if (m == 4) {
            r4 = t.num(r, "rmse_classical");
        }
        if (m == 12) {
            r12 = t.num(r, "rmse_classical");
        }
        if (m <= 10) {
            const double gap = std::abs(t.num(r, "rmse_tabu") - t.num(r, "rmse_classical"));
            if (gap > worst) {
                worst = gap;
                worst_m = m;
            }
        }
    }
    return {r12 < r4 && worst <= 5e-3,
            fmt("RMSE classical m=4 %.4f, m=12 %.4f; max |tabu - classical| for m <= 10: %.3g (m=%d)", r4, r12,
                worst, worst_m)};
}

// Largest block distance |mu/d - nu/d| carrying a nonzero entry.
int block_bandwidth(const fs::path& csv, int d) {
    const Csv t(csv);
    int widest = 0;
    for (std::size_t r = 0; r < t.size(); ++r) {
        if (t.num(r, "value") != 0.0) {
            const int br = static_cast<int>(t.num(r, "row")) / d;
            const int bc = static_cast<int>(t.num(r, "col")) / d;
            widest = std::max(widest, std::abs(br - bc));
        }
    }
    return widest;
}

Outcome qubo_structure(Runs& runs) {
    const fs::path dir = runs.dir(Experiment::QuboHeatmap);
    const Csv summary(dir / "qubo_heatmap.csv");
    const std::size_t tri = summary.find("basis", "triangular");
    const std::size_t cheb = summary.find("basis", "chebyshev");
    const int tri_bw = block_bandwidth(dir / "qubo_heatmap_triangular.csv", static_cast<int>(summary.num(tri, "d")));
    const int cheb_bw = block_bandwidth(dir / "qubo_heatmap_chebyshev.csv", static_cast<int>(summary.num(cheb, "d")));
    return {tri_bw <= 1 && summary.num(cheb, "m") >= 3 && cheb_bw >= 2,
            fmt("block bandwidth: triangular m=%s %d, chebyshev m=%s %d", summary.text(tri, "m").c_str(), tri_bw,
                summary.text(cheb, "m").c_str(), cheb_bw)};
}

Outcome dp_anchor() {
    const JitParams params{100.0, 50.0, 100.0, {}};
    const Policy p = analytic_jit_policy(params, 4, 0.0);
    const oracle::JitMinimum num = oracle::jit_minimize(4, 100.0, 50.0, 100.0, 0.0);
    bool ok = std::abs(p.total_cost - 1.990099) <= 1e-6 && std::abs(num.cost - p.total_cost) <= 1e-6;
    for (double u : p.actions) {
        ok = ok && std::abs(u - 24.752) <= 5e-4;
    }
    return {ok, fmt("u* = %.6f, cost %.7f; numerical minimum %.7f (u0 %.5f)", p.actions[0], p.total_cost, num.cost,
                    num.actions[0])};
}

Outcome table4(Runs& runs) {
    const Csv t(runs.dir(Experiment::Table4) / "table4.csv");
    const double step = 50.0 / (JitScenario{}.n_actions - 1);
    const std::size_t a = t.find("strategy", "analytic");
    const std::size_t g = t.find("strategy", "grid");
    const std::size_t inv = t.find("strategy", "inverse");
    const std::size_t tb = t.find("strategy", "tabu");
    const double va = t.num(a, "V0");
    const double vg = t.num(g, "V0");
    const double vi = t.num(inv, "V0");
    const double expected[] = {25.0, 25.0, 25.0, 24.039};
    bool actions_ok = true;
    bool tabu_ok = true;
    for (int k = 0; k < 4; ++k) {
        const std::string col = "u" + std::to_string(k);
        actions_ok = actions_ok && std::abs(t.num(inv, col) - expected[k]) <= step;
        tabu_ok = tabu_ok && std::abs(t.num(tb, col) - t.num(inv, col)) <= step;
    }
    const bool inverse_ok = std::abs(vi - 1.990384) <= 5e-4;
    const bool grid_ok = std::abs(vg - 1.992070) <= 2e-3;
    const bool order_ok = va < vi && vi < vg;
    return {step <= 0.025 && actions_ok && tabu_ok && inverse_ok && grid_ok && order_ok,
            fmt("inverse (%.3f, %.3f, %.3f, %.3f) cost %.6f; tabu (%.3f, %.3f, %.3f, %.3f); grid cost %.6f; "
                "analytic %.6f",
                t.num(inv, "u0"), t.num(inv, "u1"), t.num(inv, "u2"), t.num(inv, "u3"), vi, t.num(tb, "u0"),
                t.num(tb, "u1"), t.num(tb, "u2"), t.num(tb, "u3"), vg, va)};
}

Outcome value_mse(Runs& runs) {
    const Csv t(runs.dir(Experiment::FigValueMse) / "fig_value_mse.csv");
    std::map<int, double> by_m;
    for (std::size_t r = 0; r < t.size(); ++r) {
        if (t.text(r, "sweep") == "m" && t.num(r, "alpha") == 100.0 && t.num(r, "n") == 50.0) {
            by_m[static_cast<int>(t.num(r, "m"))] = t.num(r, "mse_fitted");
        }
    }
    const bool have = by_m.contains(4) && by_m.contains(8) && by_m.contains(16);
    const bool ok = have && by_m[8] < by_m[4] && by_m[16] < by_m[8];
    return {ok, have ? fmt("MSE m=4 %.4g, m=8 %.4g, m=16 %.4g", by_m[4], by_m[8], by_m[16]) : "missing rows"};
}

Outcome determinism(Runs& runs) {
    std::size_t files = 0;
    std::vector<std::string> differing;
    for (Experiment e : all_experiments()) {
        const fs::path first = runs.dir(e);
        ExperimentSpec spec;
        spec.name = e;
        spec.output_dir = runs.root() / "second" / to_string(e);
        run_experiment(spec);
        for (const auto& entry : fs::directory_iterator(first)) {
            if (entry.path().extension() != ".csv") {
                continue;
            }
            ++files;
            const fs::path other = spec.output_dir / entry.path().filename();
            if (!fs::exists(other) || io::read_text(entry.path()) != io::read_text(other)) {
                differing.push_back(std::string(to_string(e)) + "/" + entry.path().filename().string());
            }
        }
    }
    std::string detail = fmt("%zu CSV files compared across %zu experiments", files, all_experiments().size());
    for (const auto& d : differing) {
        detail += "; differs: " + d;
    }
    return {differing.empty() && files > 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1])
                                   : fs::temp_directory_path() /
                                         ("qubofit-acceptance-" + std::to_string(std::random_device{}()));
    fs::remove_all(root);
    Runs runs(root);

    struct Criterion {
        int id;
        const char* title;
        double limit_s;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "Ising equivalence", 10, ising_equivalence},
        {2, "encoding correctness", 30, encoding_correctness},
        {3, "brute force vs classical quantization", 60, brute_force_quantization},
        {4, "heuristic quality", 120, heuristic_quality},
        {5, "linear regression table", 30, [&] { return table1(runs); }},
        {6, "RMSE agreement versus n", 120, [&] { return table3(runs); }},
        {7, "d sweep", 120, [&] { return d_sweep(runs); }},
        {8, "m sweep", 180, [&] { return m_sweep(runs); }},
        {9, "QUBO structure", 5, [&] { return qubo_structure(runs); }},
        {10, "DP analytic anchor", 10, dp_anchor},
        {11, "just-in-time policies", 300, [&] { return table4(runs); }},
        {12, "fitted value MSE versus m", 300, [&] { return value_mse(runs); }},
        {13, "determinism", 0, [&] { return determinism(runs); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.check();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = true;
        if (c.limit_s > 0) {
            in_time = elapsed <= c.limit_s;
        }
        const bool pass = out.pass && in_time;
        failed += !pass;
        std::printf("[%s] %2d %-38s %8.2f s  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.title, elapsed,
                    out.detail.c_str(), in_time ? "" : fmt(" (over the %.0f s limit)", c.limit_s).c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed; outputs in %s\n", criteria.size(), failed, root.string().c_str());
    return failed == 0 ? 0 : 1;
}

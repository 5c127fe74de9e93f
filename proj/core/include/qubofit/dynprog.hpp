#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qubofit/basis.hpp"
#include "qubofit/encoding.hpp"
#include "qubofit/leastsq.hpp"
#include "qubofit/solvers.hpp"

namespace qubofit {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double clamp(double x) const noexcept { return x < lo ? lo : (x > hi ? hi : x); }
    bool contains(double x, double eps = 0.0) const noexcept { return x >= lo - eps && x <= hi + eps; }
};

/// Finite-horizon deterministic decision process over a scalar state and action.
struct MdpSpec {
    int horizon = 1;
    Interval states;
    Interval actions;
    std::function<double(int, double, double)> cost;        // (t, x, u)
    std::function<double(int, double, double)> transition;  // (t, x, u) -> x'
    std::function<double(double)> terminal;                 // x_T

    void validate() const;
};

/// Just-in-time arrival over a trajectory of length ell:
///   cost      ((u - w(x)) / v_max)^2
///   dynamics  x' = x + u - w(x)
///   terminal  alpha (1 - x_T / ell)^2 + 1
struct JitParams {
    double ell = 100.0;
    double v_max = 50.0;
    double alpha = 100.0;
    std::function<double(double)> current;  // empty means w == 0

    double current_at(double x) const { return current ? current(x) : 0.0; }
    void validate() const;
};

/// State bounds [0, ell], action bounds [0, v_max].
MdpSpec make_jit_mdp(const JitParams& params, int horizon);

/// Equidistant points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Optimal values on an equidistant state grid, one row per t = 0..T.
struct ValueTable {
    std::vector<double> grid;
    std::vector<std::vector<double>> values;

    int horizon() const noexcept { return static_cast<int>(values.size()) - 1; }

    /// Index of the nearest grid state (exact midpoints go to the lower one).
    std::size_t snap(double x) const;
    double at(int t, double x) const { return values[static_cast<std::size_t>(t)][snap(x)]; }
};

/// Backward Bellman sweep on the grid. Successors are clamped to the state
/// bounds and snapped to the nearest grid state.
ValueTable value_iteration_grid(const MdpSpec& mdp, std::size_t n_states, std::size_t n_actions);

/// How the recursion treats the boundary slice t = T.
enum class TerminalMode {
    Exact,   // use the terminal cost itself; the slice-T fit is kept for error reports
    Fitted,  // use the slice-T fit like any other slice
};

/// Per-slice fits V^_t(x) = sum_j c_j^(t) phi_j(x), t = 0..T.
struct FittedValue {
    std::vector<FitResult> slices;
    TerminalMode terminal_mode = TerminalMode::Exact;
    std::function<double(double)> terminal;

    int horizon() const noexcept { return static_cast<int>(slices.size()) - 1; }

    /// The fitted function of slice t (denormalized).
    double eval(int t, double x) const { return predict(slices[static_cast<std::size_t>(t)], x); }

    /// Value used by the Bellman recursion: eval(), except at t = T under TerminalMode::Exact.
    double lookup(int t, double x) const;
};

struct FittedOptions {
    TerminalMode terminal_mode = TerminalMode::Exact;
};

/// Fitted value iteration. Targets at n_samples equidistant states are
/// min-max normalized per slice and fitted with the configured backend.
/// A slice whose targets are all equal is stored as a constant.
FittedValue fitted_value_iteration(const MdpSpec& mdp, const BasisSet& basis,
                                   const FixedPointFormat& fmt, const SolverConfig& solver,
                                   std::size_t n_samples, std::size_t n_actions,
                                   const FittedOptions& options = {});

struct Policy {
    std::vector<double> actions;  // u_0 .. u_{T-1}
    std::vector<double> states;   // x_0 .. x_T
    double total_cost = 0.0;
};

/// Forward argmin over the equidistant action grid; ties go to the smallest
/// action. Actions whose successor leaves the state bounds are skipped while
/// any in-bounds action exists.
Policy extract_policy(const MdpSpec& mdp, const ValueTable& value, double x0, std::size_t n_actions);
Policy extract_policy(const MdpSpec& mdp, const FittedValue& value, double x0, std::size_t n_actions);

/// Total cost of an action sequence from x0 under the process dynamics.
Policy evaluate_actions(const MdpSpec& mdp, double x0, const std::vector<double>& actions);

/// Constant-speed optimum of the current-free problem,
///   u* = alpha v_max^2 (ell - x0) / (ell^2 + alpha T v_max^2),
/// clipped to [0, v_max]. Throws ValidationError if a current is set.
Policy analytic_jit_policy(const JitParams& params, int horizon, double x0);

/// Exact optimal cost-to-go V_t(x) of the current-free problem (k = T - t
/// steps of the clipped constant speed).
double jit_reference_value(const JitParams& params, int horizon, int t, double x);

inline constexpr std::size_t kErrorGridPoints = 1000;

/// Mean squared error of the fitted slices against reference(t, x) on
/// kErrorGridPoints equidistant states. With no t, the MSE is averaged over t = 0..T.
double value_function_error(const FittedValue& fitted,
                            const std::function<double(int, double)>& reference,
                            const Interval& domain, std::optional<int> t = std::nullopt);

/// Same, with a grid table as reference, evaluated at the table's grid states.
double value_function_error(const FittedValue& fitted, const ValueTable& reference,
                            std::optional<int> t = std::nullopt);

/// MSE of a grid table against reference(t, x) at its own grid states.
double value_table_error(const ValueTable& table,
                         const std::function<double(int, double)>& reference,
                         std::optional<int> t = std::nullopt);

/// Inputs of one just-in-time arrival run (the scenario JSON).
struct JitScenario {
    double ell = 100.0;
    double v_max = 50.0;
    int horizon = 4;
    double alpha = 100.0;
    double x0 = 0.0;
    std::size_t n_states = 50;      // grid value iteration
    std::size_t grid_actions = 101;  // grid value iteration
    std::size_t n_actions = 2001;    // fitted value iteration and policy extraction
    std::size_t n_samples = 50;
    std::size_t m = 9;
    int d = 9;
    int p = 8;
    Backend backend = Backend::Classical;
    std::uint64_t seed = 42;

    JitParams params() const { return JitParams{ell, v_max, alpha, {}}; }
};

}  // namespace qubofit

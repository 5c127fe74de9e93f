#include "qubofit/dynprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qubofit/data.hpp"
#include "qubofit/errors.hpp"
#include "qubofit/random.hpp"

namespace qubofit {

namespace {

constexpr double kBoundsEps = 1e-9;

void check_grid_sizes(std::size_t n_states, std::size_t n_actions) {
    if (n_states < 2 || n_actions < 2) {
        throw ValidationError("state and action grids need at least 2 points each");
    }
}

// Argmin over the action grid of cost(t, x, u) + next(x'), with x' clamped to
// the state bounds. Ties keep the smallest action.
template <typename Next>
std::pair<std::size_t, double> bellman_min(const MdpSpec& mdp, int t, double x,
                                           const std::vector<double>& actions, Next&& next,
                                           bool feasible_only) {
    std::size_t best = actions.size();
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < actions.size(); ++k) {
        const double u = actions[k];
        const double x_next = mdp.transition(t, x, u);
        if (feasible_only && !mdp.states.contains(x_next, kBoundsEps)) {
            continue;
        }
        const double v = mdp.cost(t, x, u) + next(mdp.states.clamp(x_next));
        if (v < best_v) {
            best_v = v;
            best = k;
        }
    }
    return {best, best_v};
}

template <typename Next>
Policy forward_pass(const MdpSpec& mdp, double x0, std::size_t n_actions, Next&& next_value) {
    mdp.validate();
    if (!mdp.states.contains(x0)) {
        throw ValidationError("initial state " + std::to_string(x0) + " outside the state bounds");
    }
    const auto actions = linspace(mdp.actions.lo, mdp.actions.hi, n_actions);
    std::vector<double> chosen;
    chosen.reserve(static_cast<std::size_t>(mdp.horizon));
    double x = x0;
    for (int t = 0; t < mdp.horizon; ++t) {
        auto next = [&](double xn) { return next_value(t + 1, xn); };
        auto [k, v] = bellman_min(mdp, t, x, actions, next, true);
        if (k == actions.size()) {
            // No action keeps the state in bounds; fall back to clamped successors.
            std::tie(k, v) = bellman_min(mdp, t, x, actions, next, false);
        }
        chosen.push_back(actions[k]);
        x = mdp.transition(t, x, actions[k]);
    }
    return evaluate_actions(mdp, x0, chosen);
}

FitResult constant_fit(const BasisSet& basis, double value) {
    return FitResult{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size())), basis,
                     Normalization{value, value}};
}

FitResult fit_slice(const std::vector<double>& xs, const std::vector<double>& targets,
                    const BasisSet& basis, const FixedPointFormat& fmt, const SolverConfig& solver) {
    const auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
    if (!(*hi > *lo)) {
        return constant_fit(basis, *lo);
    }
    const Dataset normalized = minmax_normalize(Dataset(xs, targets));
    return solve_fit(assemble(normalized, basis), fmt, solver);
}

}  // namespace

void MdpSpec::validate() const {
    if (horizon < 1) {
        throw ValidationError("horizon must be >= 1");
    }
    if (!(states.lo < states.hi) || !(actions.lo <= actions.hi)) {
        throw ValidationError("state and action bounds must be nonempty intervals");
    }
    if (!cost || !transition || !terminal) {
        throw ValidationError("MDP needs cost, transition and terminal functions");
    }
}

void JitParams::validate() const {
    if (!(ell > 0.0) || !(v_max > 0.0) || !(alpha > 0.0)) {
        throw ValidationError("just-in-time parameters need ell > 0, v_max > 0, alpha > 0");
    }
}

MdpSpec make_jit_mdp(const JitParams& params, int horizon) {
    params.validate();
    if (horizon < 1) {
        throw ValidationError("horizon must be >= 1");
    }
    MdpSpec mdp;
    mdp.horizon = horizon;
    mdp.states = {0.0, params.ell};
    mdp.actions = {0.0, params.v_max};
    mdp.cost = [params](int, double x, double u) {
        const double r = (u - params.current_at(x)) / params.v_max;
        return r * r;
    };
    mdp.transition = [params](int, double x, double u) { return x + u - params.current_at(x); };
    mdp.terminal = [params](double x) {
        const double r = 1.0 - x / params.ell;
        return params.alpha * r * r + 1.0;
    };
    return mdp;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 1) {
        return {lo};
    }
    std::vector<double> out(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + step * static_cast<double>(i);
    }
    if (n > 0) {
        out.back() = hi;
    }
    return out;
}

std::size_t ValueTable::snap(double x) const {
    const double lo = grid.front();
    const double hi = grid.back();
    if (x <= lo) {
        return 0;
    }
    if (x >= hi) {
        return grid.size() - 1;
    }
    const double h = (hi - lo) / static_cast<double>(grid.size() - 1);
    const double pos = (x - lo) / h;
    auto i = static_cast<std::size_t>(std::floor(pos));
    if (pos - static_cast<double>(i) > 0.5) {
        ++i;
    }
    return std::min(i, grid.size() - 1);
}

ValueTable value_iteration_grid(const MdpSpec& mdp, std::size_t n_states, std::size_t n_actions) {
    mdp.validate();
    check_grid_sizes(n_states, n_actions);
    ValueTable table;
    table.grid = linspace(mdp.states.lo, mdp.states.hi, n_states);
    const auto actions = linspace(mdp.actions.lo, mdp.actions.hi, n_actions);
    const auto T = static_cast<std::size_t>(mdp.horizon);
    table.values.assign(T + 1, std::vector<double>(n_states, 0.0));

    for (std::size_t i = 0; i < n_states; ++i) {
        table.values[T][i] = mdp.terminal(table.grid[i]);
    }
    for (int t = mdp.horizon - 1; t >= 0; --t) {
        const auto& next_row = table.values[static_cast<std::size_t>(t) + 1];
        auto next = [&](double xn) { return next_row[table.snap(xn)]; };
        auto& row = table.values[static_cast<std::size_t>(t)];
        for (std::size_t i = 0; i < n_states; ++i) {
            row[i] = bellman_min(mdp, t, table.grid[i], actions, next, false).second;
        }
    }
    return table;
}

double FittedValue::lookup(int t, double x) const {
    if (t == horizon() && terminal_mode == TerminalMode::Exact && terminal) {
        return terminal(x);
    }
    return eval(t, x);
}

FittedValue fitted_value_iteration(const MdpSpec& mdp, const BasisSet& basis,
                                   const FixedPointFormat& fmt, const SolverConfig& solver,
                                   std::size_t n_samples, std::size_t n_actions,
                                   const FittedOptions& options) {
    mdp.validate();
    check_grid_sizes(n_samples, n_actions);
    if (n_samples < basis.size()) {
        throw ValidationError("fitted value iteration needs n_samples >= m");
    }
    const auto samples = linspace(mdp.states.lo, mdp.states.hi, n_samples);
    const auto actions = linspace(mdp.actions.lo, mdp.actions.hi, n_actions);
    const auto T = static_cast<std::size_t>(mdp.horizon);

    FittedValue value;
    value.terminal_mode = options.terminal_mode;
    value.terminal = mdp.terminal;
    value.slices.assign(T + 1, constant_fit(basis, 0.0));

    // Each slice gets its own solver seed so heuristic runs are independent.
    auto slice_solver = [&](std::size_t t) {
        SolverConfig cfg = solver;
        cfg.params.seed = mix64(solver.params.seed ^ mix64(t));
        return cfg;
    };

    std::vector<double> targets(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        targets[i] = mdp.terminal(samples[i]);
    }
    value.slices[T] = fit_slice(samples, targets, basis, fmt, slice_solver(T));

    for (int t = mdp.horizon - 1; t >= 0; --t) {
        auto next = [&](double xn) { return value.lookup(t + 1, xn); };
        for (std::size_t i = 0; i < n_samples; ++i) {
            targets[i] = bellman_min(mdp, t, samples[i], actions, next, false).second;
        }
        value.slices[static_cast<std::size_t>(t)] =
            fit_slice(samples, targets, basis, fmt, slice_solver(static_cast<std::size_t>(t)));
    }
    return value;
}

Policy extract_policy(const MdpSpec& mdp, const ValueTable& value, double x0, std::size_t n_actions) {
    check_grid_sizes(2, n_actions);
    if (value.horizon() != mdp.horizon) {
        throw ValidationError("value table horizon does not match the MDP");
    }
    return forward_pass(mdp, x0, n_actions, [&](int t, double x) { return value.at(t, x); });
}

Policy extract_policy(const MdpSpec& mdp, const FittedValue& value, double x0, std::size_t n_actions) {
    check_grid_sizes(2, n_actions);
    if (value.horizon() != mdp.horizon) {
        throw ValidationError("fitted value horizon does not match the MDP");
    }
    return forward_pass(mdp, x0, n_actions, [&](int t, double x) { return value.lookup(t, x); });
}

Policy evaluate_actions(const MdpSpec& mdp, double x0, const std::vector<double>& actions) {
    if (actions.size() != static_cast<std::size_t>(mdp.horizon)) {
        throw ValidationError("action sequence length must equal the horizon");
    }
    Policy policy;
    policy.actions = actions;
    policy.states.reserve(actions.size() + 1);
    policy.states.push_back(x0);
    double x = x0;
    for (std::size_t t = 0; t < actions.size(); ++t) {
        const int ti = static_cast<int>(t);
        policy.total_cost += mdp.cost(ti, x, actions[t]);
        x = mdp.transition(ti, x, actions[t]);
        policy.states.push_back(x);
    }
    policy.total_cost += mdp.terminal(x);
    return policy;
}

namespace {

double constant_speed(const JitParams& p, int steps, double x) {
    const double v2 = p.v_max * p.v_max;
    const double u = p.alpha * v2 * (p.ell - x) / (p.ell * p.ell + p.alpha * steps * v2);
    return std::clamp(u, 0.0, p.v_max);
}

void require_no_current(const JitParams& p) {
    if (p.current) {
        throw ValidationError("the closed-form solution requires a zero current");
    }
}

}  // namespace

Policy analytic_jit_policy(const JitParams& params, int horizon, double x0) {
    params.validate();
    require_no_current(params);
    const MdpSpec mdp = make_jit_mdp(params, horizon);
    const double u = constant_speed(params, horizon, x0);
    return evaluate_actions(mdp, x0, std::vector<double>(static_cast<std::size_t>(horizon), u));
}

double jit_reference_value(const JitParams& params, int horizon, int t, double x) {
    require_no_current(params);
    const int k = horizon - t;
    const double u = k > 0 ? constant_speed(params, k, x) : 0.0;
    const double r = 1.0 - (x + k * u) / params.ell;
    const double s = u / params.v_max;
    return k * s * s + params.alpha * r * r + 1.0;
}

double value_function_error(const FittedValue& fitted,
                            const std::function<double(int, double)>& reference,
                            const Interval& domain, std::optional<int> t) {
    const auto xs = linspace(domain.lo, domain.hi, kErrorGridPoints);
    auto slice_mse = [&](int s) {
        double acc = 0.0;
        for (double x : xs) {
            const double e = fitted.eval(s, x) - reference(s, x);
            acc += e * e;
        }
        return acc / static_cast<double>(xs.size());
    };
    if (t) {
        if (*t < 0 || *t > fitted.horizon()) {
            throw ValidationError("time slice out of range");
        }
        return slice_mse(*t);
    }
    double total = 0.0;
    for (int s = 0; s <= fitted.horizon(); ++s) {
        total += slice_mse(s);
    }
    return total / static_cast<double>(fitted.horizon() + 1);
}

double value_function_error(const FittedValue& fitted, const ValueTable& reference,
                            std::optional<int> t) {
    if (reference.horizon() != fitted.horizon()) {
        throw ValidationError("reference table horizon does not match");
    }
    auto slice_mse = [&](int s) {
        double acc = 0.0;
        const auto& row = reference.values[static_cast<std::size_t>(s)];
        for (std::size_t i = 0; i < reference.grid.size(); ++i) {
            const double e = fitted.eval(s, reference.grid[i]) - row[i];
            acc += e * e;
        }
        return acc / static_cast<double>(reference.grid.size());
    };
    if (t) {
        return slice_mse(*t);
    }
    double total = 0.0;
    for (int s = 0; s <= fitted.horizon(); ++s) {
        total += slice_mse(s);
    }
    return total / static_cast<double>(fitted.horizon() + 1);
}

double value_table_error(const ValueTable& table,
                         const std::function<double(int, double)>& reference,
                         std::optional<int> t) {
    auto slice_mse = [&](int s) {
        double acc = 0.0;
        const auto& row = table.values[static_cast<std::size_t>(s)];
        for (std::size_t i = 0; i < table.grid.size(); ++i) {
            const double e = row[i] - reference(s, table.grid[i]);
            acc += e * e;
        }
        return acc / static_cast<double>(table.grid.size());
    };
    if (t) {
        return slice_mse(*t);
    }
    double total = 0.0;
    for (int s = 0; s <= table.horizon(); ++s) {
        total += slice_mse(s);
    }
    return total / static_cast<double>(table.horizon() + 1);
}

}  // namespace qubofit

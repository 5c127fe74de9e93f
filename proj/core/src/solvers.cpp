#include "qubofit/solvers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "qubofit/errors.hpp"
#include "qubofit/random.hpp"

namespace qubofit {

namespace {

// Flip deltas of x^T Q x for any (not necessarily symmetric) Q:
//   delta_i = (1 - 2 x_i) * (Q_ii + sum_{j != i} (Q_ij + Q_ji) x_j)
struct FlipModel {
    explicit FlipModel(const Eigen::MatrixXd& Q)
        : n(static_cast<std::size_t>(Q.rows())), diag(n), coupling(Q + Q.transpose()) {
        for (std::size_t i = 0; i < n; ++i) {
            diag[i] = Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
            coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
        }
        scale = std::max(1.0, Q.cwiseAbs().sum());
    }

    std::size_t n;
    std::vector<double> diag;
    Eigen::MatrixXd coupling;  // symmetric, zero diagonal; column-major access per flip
    double scale;
};

// Running state of one walker: bits, local fields and energy.
struct Walker {
    Walker(const FlipModel& model, Bits start) : m(model), x(std::move(start)), field(model.n, 0.0) {
        for (std::size_t j = 0; j < m.n; ++j) {
            if (x[j] != 0) {
                add_column(j, 1.0);
                energy += m.diag[j];
            }
        }
        for (std::size_t i = 0; i < m.n; ++i) {
            if (x[i] != 0) {
                // Each coupled pair counted once.
                for (std::size_t j = i + 1; j < m.n; ++j) {
                    if (x[j] != 0) {
                        energy += m.coupling(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                    }
                }
            }
        }
    }

    double delta(std::size_t i) const {
        const double sign = x[i] != 0 ? -1.0 : 1.0;
        return sign * (m.diag[i] + field[i]);
    }

    void flip(std::size_t k, double dk) {
        const double change = x[k] != 0 ? -1.0 : 1.0;
        x[k] = static_cast<std::uint8_t>(x[k] ^ 1U);
        add_column(k, change);
        energy += dk;
    }

    void add_column(std::size_t k, double change) {
        const double* col = m.coupling.data() + static_cast<std::ptrdiff_t>(k * m.n);
        for (std::size_t i = 0; i < m.n; ++i) {
            field[i] += change * col[i];
        }
    }

    const FlipModel& m;
    Bits x;
    std::vector<double> field;
    double energy = 0.0;
};

Bits random_bits(Rng& rng, std::size_t n) {
    Bits b(n);
    for (auto& v : b) {
        v = rng.coin() ? 1 : 0;
    }
    return b;
}

struct RestartOutcome {
    Bits bits;
    double energy = 0.0;
    std::uint64_t samples = 0;
};

bool better(double e, const Bits& bits, double best_e, const Bits& best_bits, double tol) {
    if (e < best_e - tol) {
        return true;
    }
    return std::abs(e - best_e) <= tol && bits < best_bits;
}

// Runs `restarts` independent restarts, possibly on several threads, and merges
// them in restart order so the outcome is independent of the thread count.
template <typename Fn>
SolveResult run_restarts(const QuboProblem& q, const SolverParams& params, const char* label,
                         Fn&& one_restart) {
    std::vector<RestartOutcome> outcomes(params.restarts);
    const std::size_t workers = std::max<std::size_t>(1, std::min(params.threads, params.restarts));
    if (workers == 1) {
        for (std::size_t r = 0; r < params.restarts; ++r) {
            outcomes[r] = one_restart(restart_seed(params.seed, r));
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < params.restarts; r += workers) {
                    outcomes[r] = one_restart(restart_seed(params.seed, r));
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    const double tol = 1e-12 * std::max(1.0, q.Q.cwiseAbs().sum());
    SolveResult result;
    result.solver = label;
    result.seed = params.seed;
    result.energy = std::numeric_limits<double>::infinity();
    for (auto& o : outcomes) {
        result.samples_evaluated += o.samples;
        if (result.bits.empty() || better(o.energy, o.bits, result.energy, result.bits, tol)) {
            result.energy = o.energy;
            result.bits = std::move(o.bits);
        }
    }
    return result;
}

}  // namespace

std::uint64_t restart_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

SolverParams SolverParams::tabu_defaults(std::uint64_t seed) {
    SolverParams p;
    p.seed = seed;
    p.restarts = 20;
    p.iterations_per_restart = 5000;
    return p;
}

SolverParams SolverParams::anneal_defaults(std::uint64_t seed) {
    SolverParams p;
    p.seed = seed;
    p.restarts = 100;
    p.iterations_per_restart = 2000;
    return p;
}

void SolverParams::validate() const {
    if (restarts < 1 || iterations_per_restart < 1) {
        throw ValidationError("solver restarts and iterations must be >= 1");
    }
    if (tabu_tenure && *tabu_tenure < 1) {
        throw ValidationError("tabu tenure must be >= 1");
    }
    if (schedule.t_end && !(*schedule.t_end > 0.0)) {
        throw ValidationError("annealing end temperature must be > 0");
    }
    if (schedule.t_start && schedule.t_end && *schedule.t_start < *schedule.t_end) {
        throw ValidationError("annealing start temperature must be >= end temperature");
    }
    if (schedule.t_start && !(*schedule.t_start > 0.0)) {
        throw ValidationError("annealing start temperature must be > 0");
    }
}

SolveResult brute_force(const QuboProblem& q) {
    const std::size_t n = q.size();
    if (n > kBruteForceLimit) {
        throw TooLarge("brute force is limited to N <= " + std::to_string(kBruteForceLimit) +
                       ", got N = " + std::to_string(n));
    }
    SolveResult result;
    result.solver = "brute";
    if (n == 0) {
        return result;
    }

    const FlipModel model(q.Q);
    Walker walker(model, Bits(n, 0));
    const double tol = 1e-10 * model.scale;
    Bits best = walker.x;
    double best_e = walker.energy;  // all-zero energy is exactly 0

    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < total; ++step) {
        // Gray code: flip the lowest set bit position of step.
        const auto k = static_cast<std::size_t>(std::countr_zero(step));
        walker.flip(k, walker.delta(k));
        if ((step & 0xFFF) == 0) {
            walker.energy = qubo_energy(q.Q, walker.x);
        }
        if (walker.energy < best_e + tol && better(walker.energy, walker.x, best_e, best, tol)) {
            best_e = walker.energy;
            best = walker.x;
        }
    }
    result.bits = std::move(best);
    result.energy = qubo_energy(q.Q, result.bits);
    result.samples_evaluated = total;
    return result;
}

SolveResult simulated_annealing(const QuboProblem& q, const SolverParams& params) {
    params.validate();
    const std::size_t n = q.size();
    const FlipModel model(q.Q);

    double max_abs = q.Q.size() > 0 ? q.Q.cwiseAbs().maxCoeff() : 0.0;
    if (max_abs == 0.0) {
        max_abs = 1.0;
    }
    const double t_start = params.schedule.t_start.value_or(max_abs);
    const double t_end = params.schedule.t_end.value_or(1e-3 * t_start);
    if (t_start < t_end) {
        throw ValidationError("annealing start temperature must be >= end temperature");
    }
    const std::size_t sweeps = params.iterations_per_restart;
    const double ratio =
        sweeps > 1 ? std::pow(t_end / t_start, 1.0 / static_cast<double>(sweeps - 1)) : 1.0;
    const double tol = 1e-12 * model.scale;

    auto one_restart = [&](std::uint64_t seed) {
        Rng rng(seed);
        Walker walker(model, random_bits(rng, n));
        RestartOutcome out{walker.x, walker.energy, 1};
        double temperature = t_start;
        for (std::size_t s = 0; s < sweeps; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                const double d = walker.delta(i);
                if (d <= 0.0 || rng.uniform() < std::exp(-d / temperature)) {
                    walker.flip(i, d);
                    if (walker.energy < out.energy - tol) {
                        out.energy = walker.energy;
                        out.bits = walker.x;
                    }
                }
            }
            out.samples += n;
            temperature *= ratio;
        }
        out.energy = qubo_energy(q.Q, out.bits);
        return out;
    };
    return run_restarts(q, params, "anneal", one_restart);
}

SolveResult tabu_search(const QuboProblem& q, const SolverParams& params) {
    params.validate();
    const std::size_t n = q.size();
    const FlipModel model(q.Q);
    const std::size_t tenure = params.tabu_tenure.value_or(std::max<std::size_t>(7, n / 4));
    const double tol = 1e-12 * model.scale;

    // Tenure is jittered and ties are broken at random, otherwise the walk locks
    // into short cycles on the flat landscapes fixed-point encodings produce.
    // After a stall the walk restarts from a perturbed copy of its best state.
    const std::size_t stall_limit = std::max<std::size_t>(200, 2 * n);
    const std::size_t kick = std::max<std::size_t>(2, n / 5);

    auto one_restart = [&](std::uint64_t seed) {
        Rng rng(seed);
        Walker walker(model, random_bits(rng, n));
        RestartOutcome out{walker.x, walker.energy, 1};
        if (n == 0) {
            return out;
        }
        std::vector<std::size_t> tabu_until(n, 0);
        std::size_t last_improvement = 0;
        for (std::size_t it = 0; it < params.iterations_per_restart; ++it) {
            if (it - last_improvement > stall_limit) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (walker.x[i] != out.bits[i]) {
                        walker.flip(i, walker.delta(i));
                    }
                }
                for (std::size_t k = 0; k < kick; ++k) {
                    const std::size_t i = rng.below(n);
                    walker.flip(i, walker.delta(i));
                }
                std::fill(tabu_until.begin(), tabu_until.end(), 0);
                last_improvement = it;
            }
            std::size_t pick = n;
            double pick_delta = std::numeric_limits<double>::infinity();
            std::size_t ties = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = walker.delta(i);
                const bool allowed = tabu_until[i] <= it || walker.energy + d < out.energy - tol;
                if (!allowed) {
                    continue;
                }
                if (d < pick_delta - tol) {
                    pick = i;
                    pick_delta = d;
                    ties = 1;
                } else if (d <= pick_delta + tol && rng.below(++ties) == 0) {
                    pick = i;
                    pick_delta = d;
                }
            }
            if (pick == n) {
                // Every move is tabu: release the one that expires first.
                pick = static_cast<std::size_t>(
                    std::min_element(tabu_until.begin(), tabu_until.end()) - tabu_until.begin());
                pick_delta = walker.delta(pick);
            }
            walker.flip(pick, pick_delta);
            tabu_until[pick] = it + 1 + tenure + rng.below(tenure / 2 + 1);
            ++out.samples;
            if (walker.energy < out.energy - tol) {
                out.energy = walker.energy;
                out.bits = walker.x;
                last_improvement = it;
            }
        }
        out.energy = qubo_energy(q.Q, out.bits);
        return out;
    };
    return run_restarts(q, params, "tabu", one_restart);
}

const char* to_string(Backend backend) noexcept {
    switch (backend) {
        case Backend::Classical: return "classical";
        case Backend::BruteForce: return "brute";
        case Backend::Tabu: return "tabu";
        case Backend::Annealing: return "anneal";
        case Backend::External: return "external";
    }
    return "unknown";
}

Backend backend_from_string(const std::string& name) {
    if (name == "classical" || name == "inverse") return Backend::Classical;
    if (name == "brute" || name == "bruteforce") return Backend::BruteForce;
    if (name == "tabu") return Backend::Tabu;
    if (name == "anneal" || name == "annealing" || name == "sa") return Backend::Annealing;
    if (name == "external") return Backend::External;
    throw ValidationError("unknown backend '" + name +
                          "' (expected classical, brute, tabu, anneal or external)");
}

SolveResult solve_qubo(const QuboProblem& q, const SolverConfig& config) {
    switch (config.backend) {
        case Backend::BruteForce: return brute_force(q);
        case Backend::Tabu: return tabu_search(q, config.params);
        case Backend::Annealing: return simulated_annealing(q, config.params);
        case Backend::External:
            if (config.external_command.empty()) {
                throw ValidationError("external backend needs a sampler command");
            }
            return external_sample(q, config.external_command);
        case Backend::Classical: break;
    }
    throw ValidationError("the classical backend does not solve QUBOs");
}

QuboFit solve_fit_detailed(const NormalSystem& sys, const FixedPointFormat& fmt,
                           const SolverConfig& config) {
    if (config.backend == Backend::Classical) {
        return QuboFit{solve_classical(sys), std::nullopt};
    }
    const QuboProblem q = build_qubo(sys, fmt);
    SolveResult solved = solve_qubo(q, config);
    const auto c = decode_bits(solved.bits, fmt, q.m);
    FitResult fit{Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())),
                  sys.basis, sys.norm};
    return QuboFit{std::move(fit), std::move(solved)};
}

FitResult solve_fit(const NormalSystem& sys, const FixedPointFormat& fmt, const SolverConfig& config) {
    return solve_fit_detailed(sys, fmt, config).fit;
}

}  // namespace qubofit

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "qubofit/encoding.hpp"
#include "qubofit/leastsq.hpp"

namespace qubofit {

struct SolveResult {
    Bits bits;
    double energy = 0.0;  // psi^T Q psi recomputed from bits
    std::uint64_t samples_evaluated = 0;
    std::string solver;
    std::uint64_t seed = 0;
};

/// Geometric cooling from t_start to t_end over the sweeps of one restart.
/// Unset temperatures default to max|Q_ij| and 1e-3 of the start temperature.
struct AnnealSchedule {
    std::optional<double> t_start;
    std::optional<double> t_end;
};

struct SolverParams {
    std::uint64_t seed = 0;
    std::size_t restarts = 20;
    std::size_t iterations_per_restart = 5000;
    std::optional<std::size_t> tabu_tenure;  // default max(7, N/4)
    AnnealSchedule schedule;
    std::size_t threads = 1;  // results do not depend on this

    static SolverParams tabu_defaults(std::uint64_t seed = 0);
    static SolverParams anneal_defaults(std::uint64_t seed = 0);

    void validate() const;
};

/// Largest N accepted by brute_force().
inline constexpr std::size_t kBruteForceLimit = 24;

/// Exact minimum by Gray-code enumeration; ties go to the lexicographically
/// smallest bitstring. Throws TooLarge when N > kBruteForceLimit.
SolveResult brute_force(const QuboProblem& q);

/// Multi-start single-flip simulated annealing with Metropolis acceptance.
SolveResult simulated_annealing(const QuboProblem& q, const SolverParams& params);

/// Multi-start one-flip tabu search. Each iteration takes the best non-tabu
/// flip (a tabu flip is allowed if it beats the best known energy); the
/// flipped variable stays tabu for `tabu_tenure` iterations plus a random
/// extra of up to half that. A restart that stalls resumes from a perturbed
/// copy of its best state.
SolveResult tabu_search(const QuboProblem& q, const SolverParams& params);

/// Seed of restart `index` derived from the master seed.
std::uint64_t restart_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Hands the QUBO to an external program: the JSON export is written to a
/// temporary file whose path is the program's only argument, and the program
/// prints a JSON array of {"bits": [...], "energy": e} on stdout. Every
/// reported energy is re-verified; the lowest-energy sample is returned.
/// Throws ExternalFailure or EnergyMismatch.
SolveResult external_sample(const QuboProblem& q, const std::string& command);

/// Tolerance on |reported - recomputed| energies from an external sampler.
inline constexpr double kExternalEnergyTolerance = 1e-6;

enum class Backend { Classical, BruteForce, Tabu, Annealing, External };

const char* to_string(Backend backend) noexcept;
Backend backend_from_string(const std::string& name);

struct SolverConfig {
    Backend backend = Backend::Classical;
    SolverParams params;
    std::string external_command;  // Backend::External only
};

/// Dispatches a QUBO to one of the binary backends (Classical is rejected).
SolveResult solve_qubo(const QuboProblem& q, const SolverConfig& config);

struct QuboFit {
    FitResult fit;
    std::optional<SolveResult> solve;  // empty for Backend::Classical
};

/// Least-squares fit through the chosen backend: Classical solves the normal
/// equations, every other backend builds the QUBO, minimizes it and decodes
/// the bits into coefficients.
QuboFit solve_fit_detailed(const NormalSystem& sys, const FixedPointFormat& fmt,
                           const SolverConfig& config);
FitResult solve_fit(const NormalSystem& sys, const FixedPointFormat& fmt, const SolverConfig& config);

}  // namespace qubofit

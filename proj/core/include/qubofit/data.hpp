#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qubofit/leastsq.hpp"

namespace qubofit {

enum class SampleKind { Linear, Quadratic, Cubic, Trigonometric, CustomPolynomial };

/// Noisy samples of a test curve at x_i = i / (n - 1):
///   linear         x/2 + 1
///   quadratic      3x^2/4
///   cubic          3x^3/4 + x/4
///   trigonometric  sin(2 pi x) cos(2 pi x)
///   custom         sum_k coeffs[k] x^k
/// plus i.i.d. N(0, noise_sigma^2) noise.
struct GeneratorSpec {
    SampleKind kind = SampleKind::Linear;
    std::vector<double> coeffs;  // CustomPolynomial only, ascending powers
    std::size_t n = 64;
    double noise_sigma = 0.03;
    std::uint64_t seed = 0;
};

/// Sidecar record describing how a dataset was produced.
struct DatasetMeta {
    std::string kind;
    std::size_t n = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> y_min;
    std::optional<double> y_max;
    std::string generator;
};

inline constexpr double kDefaultApeDelta = 1e-12;

/// Noise uses Rng (mt19937_64 + Box-Muller) seeded with spec.seed, one draw per point.
Dataset generate(const GeneratorSpec& spec);

double sample_curve(const GeneratorSpec& spec, double x);

/// y' = (y - y_min) / (y_max - y_min); throws DegenerateRange when all ys are equal.
Dataset minmax_normalize(const Dataset& data);

/// |a - b| / max(|a|, delta) * 100
double ape(double a, double b, double delta = kDefaultApeDelta);

/// Root mean squared residual of the fit. If the dataset is normalized the
/// residuals are taken in normalized units (the fit's raw expansion).
double rmse(const FitResult& fit, const Dataset& data);
double mse(const FitResult& fit, const Dataset& data);

const char* to_string(SampleKind kind) noexcept;
SampleKind sample_kind_from_string(const std::string& name);

DatasetMeta describe(const GeneratorSpec& spec, const Dataset& data);

}  // namespace qubofit

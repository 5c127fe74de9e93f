#include "qubofit/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qubofit/errors.hpp"
#include "qubofit/random.hpp"

namespace qubofit {

double sample_curve(const GeneratorSpec& spec, double x) {
    switch (spec.kind) {
        case SampleKind::Linear: return 0.5 * x + 1.0;
        case SampleKind::Quadratic: return 0.75 * x * x;
        case SampleKind::Cubic: return 0.75 * x * x * x + 0.25 * x;
        case SampleKind::Trigonometric: {
            const double a = 2.0 * std::numbers::pi * x;
            return std::sin(a) * std::cos(a);
        }
        case SampleKind::CustomPolynomial: {
            double acc = 0.0;
            for (auto it = spec.coeffs.rbegin(); it != spec.coeffs.rend(); ++it) {
                acc = acc * x + *it;
            }
            return acc;
        }
    }
    return 0.0;
}

Dataset generate(const GeneratorSpec& spec) {
    if (spec.n < 2) {
        throw ValidationError("generator needs n >= 2");
    }
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
        throw ValidationError("noise sigma must be finite and >= 0");
    }
    if (spec.kind == SampleKind::CustomPolynomial && spec.coeffs.empty()) {
        throw ValidationError("custom polynomial needs at least one coefficient");
    }
    Rng rng(spec.seed);
    std::vector<double> xs(spec.n);
    std::vector<double> ys(spec.n);
    const double denom = static_cast<double>(spec.n - 1);
    for (std::size_t i = 0; i < spec.n; ++i) {
        xs[i] = static_cast<double>(i) / denom;
        ys[i] = sample_curve(spec, xs[i]) + spec.noise_sigma * rng.normal();
    }
    return Dataset(std::move(xs), std::move(ys));
}

Dataset minmax_normalize(const Dataset& data) {
    const auto ys = data.ys();
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    const double y_min = *lo;
    const double y_max = *hi;
    if (!(y_max > y_min)) {
        throw DegenerateRange("cannot min-max normalize: all ordinates equal " + std::to_string(y_min));
    }
    std::vector<double> out(ys.size());
    const double range = y_max - y_min;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        out[i] = std::clamp((ys[i] - y_min) / range, 0.0, 1.0);
    }
    const auto xs = data.xs();
    return Dataset(std::vector<double>(xs.begin(), xs.end()), std::move(out),
                   Normalization{y_min, y_max});
}

double ape(double a, double b, double delta) {
    if (!(delta > 0.0)) {
        throw ValidationError("ape needs delta > 0");
    }
    return std::abs(a - b) / std::max(std::abs(a), delta) * 100.0;
}

double mse(const FitResult& fit, const Dataset& data) {
    const auto xs = data.xs();
    const auto ys = data.ys();
    const bool normalized = data.norm().has_value();
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double f = normalized ? expansion(fit, xs[i]) : predict(fit, xs[i]);
        const double r = ys[i] - f;
        acc += r * r;
    }
    return acc / static_cast<double>(data.size());
}

double rmse(const FitResult& fit, const Dataset& data) { return std::sqrt(mse(fit, data)); }

const char* to_string(SampleKind kind) noexcept {
    switch (kind) {
        case SampleKind::Linear: return "linear";
        case SampleKind::Quadratic: return "quadratic";
        case SampleKind::Cubic: return "cubic";
        case SampleKind::Trigonometric: return "trigonometric";
        case SampleKind::CustomPolynomial: return "polynomial";
    }
    return "unknown";
}

SampleKind sample_kind_from_string(const std::string& name) {
    if (name == "linear") return SampleKind::Linear;
    if (name == "quadratic") return SampleKind::Quadratic;
    if (name == "cubic") return SampleKind::Cubic;
    if (name == "trigonometric" || name == "trig") return SampleKind::Trigonometric;
    if (name == "polynomial" || name == "custom") return SampleKind::CustomPolynomial;
    throw ValidationError("unknown sample kind '" + name + "'");
}

DatasetMeta describe(const GeneratorSpec& spec, const Dataset& data) {
    DatasetMeta meta;
    meta.kind = to_string(spec.kind);
    meta.n = data.size();
    meta.sigma = spec.noise_sigma;
    meta.seed = spec.seed;
    meta.generator = kNoiseGenerator;
    if (data.norm()) {
        meta.y_min = data.norm()->y_min;
        meta.y_max = data.norm()->y_max;
    }
    return meta;
}

}  // namespace qubofit

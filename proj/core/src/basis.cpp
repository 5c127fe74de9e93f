#include "qubofit/basis.hpp"

#include <cmath>
#include <string>

#include "qubofit/errors.hpp"

namespace qubofit {

namespace {

void check_knots(std::span<const double> knots) {
    if (knots.size() < 2) {
        throw ValidationError("triangular basis needs at least 2 knots");
    }
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!std::isfinite(knots[i])) {
            throw ValidationError("knots must be finite");
        }
        if (i > 0 && !(knots[i] > knots[i - 1])) {
            throw ValidationError("knots must be strictly increasing");
        }
    }
}

// Evaluation without validation; knots are checked once at construction.
double hat(std::size_t j, double x, std::span<const double> knots) {
    const std::size_t last = knots.size() - 1;
    if (j > 0 && x >= knots[j - 1] && x < knots[j]) {
        return (x - knots[j - 1]) / (knots[j] - knots[j - 1]);
    }
    if (j < last && x >= knots[j] && x < knots[j + 1]) {
        return (knots[j + 1] - x) / (knots[j + 1] - knots[j]);
    }
    if (j == last && x == knots[last]) {
        return 1.0;
    }
    return 0.0;
}

}  // namespace

double chebyshev_t(std::size_t j, double x) {
    if (j == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double curr = x;
    for (std::size_t k = 2; k <= j; ++k) {
        const double next = 2.0 * x * curr - prev;
        prev = curr;
        curr = next;
    }
    return curr;
}

double triangular(std::size_t j, double x, std::span<const double> knots) {
    check_knots(knots);
    if (j >= knots.size()) {
        throw ValidationError("triangular basis index out of range");
    }
    return hat(j, x, knots);
}

std::vector<double> uniform_knots(double lo, double hi, std::size_t m) {
    if (m < 2) {
        throw ValidationError("uniform_knots needs m >= 2");
    }
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ValidationError("uniform_knots needs a nonempty finite range");
    }
    std::vector<double> knots(m);
    const double step = (hi - lo) / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        knots[i] = lo + step * static_cast<double>(i);
    }
    knots.back() = hi;
    return knots;
}

BasisSet::BasisSet(BasisKind kind, std::size_t m, std::vector<double> knots,
                   std::optional<ChebyshevDomain> remap)
    : kind_(kind), size_(m), knots_(std::move(knots)), remap_(remap) {}

BasisSet BasisSet::triangular(std::vector<double> knots) {
    check_knots(knots);
    const std::size_t m = knots.size();
    return BasisSet(BasisKind::Triangular, m, std::move(knots), std::nullopt);
}

BasisSet BasisSet::triangular_uniform(double lo, double hi, std::size_t m) {
    return triangular(uniform_knots(lo, hi, m));
}

BasisSet BasisSet::chebyshev(std::size_t m, std::optional<ChebyshevDomain> remap) {
    if (m < 1) {
        throw ValidationError("Chebyshev basis needs m >= 1");
    }
    if (remap && !(remap->lo < remap->hi)) {
        throw ValidationError("Chebyshev remap domain must be nonempty");
    }
    return BasisSet(BasisKind::Chebyshev, m, {}, remap);
}

double BasisSet::eval(std::size_t j, double x) const {
    if (j >= size_) {
        throw ValidationError("basis index " + std::to_string(j) + " out of range for m = " +
                              std::to_string(size_));
    }
    if (kind_ == BasisKind::Triangular) {
        return hat(j, x, knots_);
    }
    if (remap_) {
        x = (2.0 * x - remap_->lo - remap_->hi) / (remap_->hi - remap_->lo);
    }
    return chebyshev_t(j, x);
}

void BasisSet::eval_all(double x, std::span<double> out) const {
    if (out.size() != size_) {
        throw ValidationError("eval_all output size mismatch");
    }
    if (kind_ == BasisKind::Triangular) {
        for (std::size_t j = 0; j < size_; ++j) {
            out[j] = hat(j, x, knots_);
        }
        return;
    }
    if (remap_) {
        x = (2.0 * x - remap_->lo - remap_->hi) / (remap_->hi - remap_->lo);
    }
    out[0] = 1.0;
    if (size_ > 1) {
        out[1] = x;
    }
    for (std::size_t j = 2; j < size_; ++j) {
        out[j] = 2.0 * x * out[j - 1] - out[j - 2];
    }
}

std::vector<double> BasisSet::eval_all(double x) const {
    std::vector<double> out(size_);
    eval_all(x, out);
    return out;
}

double eval_basis(const BasisSet& basis, std::size_t j, double x) {
    return basis.eval(j, x);
}

const char* to_string(BasisKind kind) noexcept {
    return kind == BasisKind::Triangular ? "triangular" : "chebyshev";
}

BasisKind basis_kind_from_string(const std::string& name) {
    if (name == "triangular" || name == "tri") {
        return BasisKind::Triangular;
    }
    if (name == "chebyshev" || name == "cheb") {
        return BasisKind::Chebyshev;
    }
    throw ValidationError("unknown basis kind '" + name + "'");
}

}  // namespace qubofit

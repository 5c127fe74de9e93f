#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qubofit {

enum class BasisKind { Triangular, Chebyshev };

/// Affine map of an interval [lo, hi] onto [-1, 1], applied before evaluating T_j.
struct ChebyshevDomain {
    double lo = -1.0;
    double hi = 1.0;
};

/// Chebyshev polynomial of the first kind, T_j(x), by forward recurrence.
double chebyshev_t(std::size_t j, double x);

/// Hat function j over strictly increasing knots. Knot j is the peak; the last
/// function takes the value 1 at the closed right endpoint.
double triangular(std::size_t j, double x, std::span<const double> knots);

/// m equally spaced knots from lo to hi inclusive.
std::vector<double> uniform_knots(double lo, double hi, std::size_t m);

/// The functions phi_0 ... phi_{m-1} of an expansion f(x) = sum_j c_j phi_j(x).
/// Immutable after construction.
class BasisSet {
public:
    static BasisSet triangular(std::vector<double> knots);
    static BasisSet triangular_uniform(double lo, double hi, std::size_t m);

    /// Chebyshev T_0 ... T_{m-1}. By default T_j is evaluated at the raw
    /// abscissa; pass a domain to remap it onto [-1, 1] first.
    static BasisSet chebyshev(std::size_t m, std::optional<ChebyshevDomain> remap = std::nullopt);

    BasisKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return size_; }
    std::span<const double> knots() const noexcept { return knots_; }
    const std::optional<ChebyshevDomain>& remap() const noexcept { return remap_; }

    /// phi_j(x); throws ValidationError when j >= size().
    double eval(std::size_t j, double x) const;

    /// All m values at x, written into out (out.size() must equal size()).
    void eval_all(double x, std::span<double> out) const;
    std::vector<double> eval_all(double x) const;

private:
    BasisSet(BasisKind kind, std::size_t m, std::vector<double> knots,
             std::optional<ChebyshevDomain> remap);

    BasisKind kind_;
    std::size_t size_;
    std::vector<double> knots_;
    std::optional<ChebyshevDomain> remap_;
};

double eval_basis(const BasisSet& basis, std::size_t j, double x);

const char* to_string(BasisKind kind) noexcept;
BasisKind basis_kind_from_string(const std::string& name);

}  // namespace qubofit

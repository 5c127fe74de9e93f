#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qubofit/basis.hpp"

namespace qubofit {

/// Ordinate range recorded by a min-max normalization.
struct Normalization {
    double y_min = 0.0;
    double y_max = 1.0;

    double denormalize(double v) const noexcept { return y_min + (y_max - y_min) * v; }
};

/// Ordered sample points (x_i, y_i) with strictly increasing abscissae.
class Dataset {
public:
    Dataset(std::vector<double> xs, std::vector<double> ys,
            std::optional<Normalization> norm = std::nullopt);

    std::size_t size() const noexcept { return xs_.size(); }
    std::span<const double> xs() const noexcept { return xs_; }
    std::span<const double> ys() const noexcept { return ys_; }
    const std::optional<Normalization>& norm() const noexcept { return norm_; }

    double x_min() const noexcept { return xs_.front(); }
    double x_max() const noexcept { return xs_.back(); }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
    std::optional<Normalization> norm_;
};

/// W_jk = sum_i phi_j(x_i) phi_k(x_i) and b_j = sum_i y_i phi_j(x_i).
struct NormalSystem {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
    BasisSet basis;
    std::optional<Normalization> norm;  // carried from the dataset
};

struct FitResult {
    Eigen::VectorXd coefficients;
    BasisSet basis;
    std::optional<Normalization> norm;
};

/// Matrices above this condition number are solved through the pseudoinverse.
inline constexpr double kPseudoinverseCondition = 1e12;

NormalSystem assemble(const Dataset& data, const BasisSet& basis);

/// Minimizer of Z(c) = c^T W c - 2 c^T b. Uses an LU solve when W is well
/// conditioned and the minimum-norm least-squares solution otherwise.
/// Throws SingularSystem on non-finite input or output.
FitResult solve_classical(const NormalSystem& sys);

/// Z(c) = c^T W c - 2 c^T b (the residual sum of squares minus sum_i y_i^2).
double objective(const NormalSystem& sys, const Eigen::VectorXd& c);

/// sum_j c_j phi_j(x), in the normalized space the fit was computed in.
double expansion(const FitResult& fit, double x);

/// expansion() mapped back through the normalization record, if any.
double predict(const FitResult& fit, double x);

}  // namespace qubofit

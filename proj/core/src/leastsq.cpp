#include "qubofit/leastsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qubofit/errors.hpp"

namespace qubofit {

Dataset::Dataset(std::vector<double> xs, std::vector<double> ys, std::optional<Normalization> norm)
    : xs_(std::move(xs)), ys_(std::move(ys)), norm_(norm) {
    if (xs_.empty()) {
        throw ValidationError("dataset must contain at least one point");
    }
    if (xs_.size() != ys_.size()) {
        throw ValidationError("dataset xs and ys differ in length (" + std::to_string(xs_.size()) +
                              " vs " + std::to_string(ys_.size()) + ")");
    }
    for (std::size_t i = 0; i < xs_.size(); ++i) {
        if (!std::isfinite(xs_[i]) || !std::isfinite(ys_[i])) {
            throw ValidationError("dataset contains a non-finite value");
        }
        if (i > 0 && !(xs_[i] > xs_[i - 1])) {
            throw ValidationError("dataset abscissae must be strictly increasing");
        }
    }
    if (norm_) {
        for (double y : ys_) {
            if (y < 0.0 || y > 1.0) {
                throw ValidationError("normalized dataset has an ordinate outside [0, 1]");
            }
        }
    }
}

NormalSystem assemble(const Dataset& data, const BasisSet& basis) {
    const auto m = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd phi(m);

    const auto xs = data.xs();
    const auto ys = data.ys();
    for (std::size_t i = 0; i < data.size(); ++i) {
        basis.eval_all(xs[i], std::span<double>(phi.data(), phi.size()));
        b += ys[i] * phi;
        // Upper triangle only, mirrored below, so W is symmetric bit-for-bit.
        for (Eigen::Index j = 0; j < m; ++j) {
            if (phi[j] == 0.0) {
                continue;
            }
            for (Eigen::Index k = j; k < m; ++k) {
                W(j, k) += phi[j] * phi[k];
            }
        }
    }
    W.triangularView<Eigen::StrictlyLower>() = W.transpose().triangularView<Eigen::StrictlyLower>();
    return NormalSystem{std::move(W), std::move(b), basis, data.norm()};
}

FitResult solve_classical(const NormalSystem& sys) {
    if (sys.W.rows() != sys.W.cols() || sys.W.rows() != sys.b.size() ||
        static_cast<std::size_t>(sys.b.size()) != sys.basis.size()) {
        throw ValidationError("normal system dimensions are inconsistent");
    }
    if (!sys.W.allFinite() || !sys.b.allFinite()) {
        throw SingularSystem("normal system contains non-finite entries");
    }

    Eigen::VectorXd c;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.W);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double smin = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();

    if (cond <= kPseudoinverseCondition) {
        c = sys.W.partialPivLu().solve(sys.b);
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys.W);
        cod.setThreshold(1.0 / kPseudoinverseCondition);
        c = cod.solve(sys.b);
    }
    if (!c.allFinite()) {
        throw SingularSystem("least-squares solve produced non-finite coefficients");
    }
    return FitResult{std::move(c), sys.basis, sys.norm};
}

double objective(const NormalSystem& sys, const Eigen::VectorXd& c) {
    if (c.size() != sys.b.size()) {
        throw ValidationError("objective: coefficient vector has length " + std::to_string(c.size()) +
                              ", expected " + std::to_string(sys.b.size()));
    }
    return c.dot(sys.W * c) - 2.0 * c.dot(sys.b);
}

double expansion(const FitResult& fit, double x) {
    const std::size_t m = fit.basis.size();
    double acc = 0.0;
    if (fit.basis.kind() == BasisKind::Triangular) {
        // At most two hat functions are nonzero at any x.
        const auto knots = fit.basis.knots();
        if (x < knots.front() || x > knots.back()) {
            return 0.0;
        }
        const auto seg = static_cast<std::size_t>(
            std::upper_bound(knots.begin(), knots.end(), x) - knots.begin()) - 1;
        if (seg == m - 1) {
            return fit.coefficients[static_cast<Eigen::Index>(seg)];
        }
        const double width = knots[seg + 1] - knots[seg];
        return fit.coefficients[static_cast<Eigen::Index>(seg)] * ((knots[seg + 1] - x) / width) +
               fit.coefficients[static_cast<Eigen::Index>(seg + 1)] * ((x - knots[seg]) / width);
    }
    double phi[64];
    std::vector<double> heap;
    std::span<double> out;
    if (m <= 64) {
        out = std::span<double>(phi, m);
    } else {
        heap.resize(m);
        out = heap;
    }
    fit.basis.eval_all(x, out);
    for (std::size_t j = 0; j < m; ++j) {
        acc += fit.coefficients[static_cast<Eigen::Index>(j)] * out[j];
    }
    return acc;
}

double predict(const FitResult& fit, double x) {
    const double v = expansion(fit, x);
    return fit.norm ? fit.norm->denormalize(v) : v;
}

}  // namespace qubofit

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qubofit/leastsq.hpp"

namespace qubofit {

using Bits = std::vector<std::uint8_t>;

/// Two's-complement fixed-point layout with `digits` bits, `point` of them
/// after the binary point. Bit r has weight sigma_r * 2^(r - point), where
/// sigma_r = -1 for the most significant bit and +1 otherwise.
class FixedPointFormat {
public:
    FixedPointFormat(int digits, int point);

    int digits() const noexcept { return digits_; }
    int point() const noexcept { return point_; }

    double sign(int r) const noexcept { return r == digits_ - 1 ? -1.0 : 1.0; }
    double bit_weight(int r) const noexcept;

    double step() const noexcept;       // 2^-p
    double min_value() const noexcept;  // -2^(d-1-p)
    double max_value() const noexcept;  // (2^(d-1) - 1) * 2^-p

    bool operator==(const FixedPointFormat&) const = default;

private:
    int digits_;
    int point_;
};

/// Bits of psi, coefficient-major and LSB-first: index mu = j * d + r.
/// Values are rounded to the nearest representable number, ties toward -inf.
/// Throws OutOfRange when a coefficient is outside [min_value, max_value].
Bits encode_coefficients(std::span<const double> coefficients, const FixedPointFormat& fmt);

std::vector<double> decode_bits(std::span<const std::uint8_t> bits, const FixedPointFormat& fmt,
                                std::size_t m);

/// Minimize psi^T Q psi over binary psi. Q is kept symmetric unless produced
/// by upper_triangularize().
struct QuboProblem {
    Eigen::MatrixXd Q;
    std::size_t m = 0;
    FixedPointFormat fmt{1, 0};
    std::optional<Normalization> norm;
    bool upper = false;

    std::size_t size() const noexcept { return static_cast<std::size_t>(Q.rows()); }

    /// A bare QUBO with no coefficient bookkeeping (m = N, one bit each).
    static QuboProblem from_matrix(Eigen::MatrixXd Q);
};

/// psi^T Q psi, computed from scratch.
double qubo_energy(const Eigen::MatrixXd& Q, std::span<const std::uint8_t> bits);
double qubo_energy(const QuboProblem& q, std::span<const std::uint8_t> bits);

/// Spin Hamiltonian sum_{i<j} J_ij s_i s_j + sum_i h_i s_i.
struct IsingProblem {
    Eigen::MatrixXd J;  // strictly upper triangular
    Eigen::VectorXd h;
    double offset = 0.0;

    /// Energy without the offset; ising energy + offset equals the QUBO energy.
    double energy(std::span<const int> spins) const;
};

/// Q = W' - diag(b') with W'_{mu nu} = 2^(r+s-2p) sigma_r sigma_s W_{jk} and
/// b'_mu = 2^(r-p+1) sigma_r b_j, so that psi^T Q psi == Z(decode(psi)).
QuboProblem build_qubo(const NormalSystem& sys, const FixedPointFormat& fmt);

QuboProblem upper_triangularize(const QuboProblem& q);
QuboProblem symmetrize(const QuboProblem& q);

/// Spins s = 2z - 1.
IsingProblem to_ising(const QuboProblem& q);

/// Fraction of nonzero (|v| > 1e-12) strictly-upper entries of the upper-triangular form.
double density(const QuboProblem& q);

}  // namespace qubofit

#include "qubofit/encoding.hpp"

#include <cmath>
#include <string>

#include "qubofit/errors.hpp"

namespace qubofit {

FixedPointFormat::FixedPointFormat(int digits, int point) : digits_(digits), point_(point) {
    if (digits < 1 || digits > 52) {
        throw ValidationError("fixed-point digits must be in [1, 52], got " + std::to_string(digits));
    }
    if (point < 0 || point > digits - 1) {
        throw ValidationError("fixed-point position must be in [0, d-1], got p = " +
                              std::to_string(point) + " for d = " + std::to_string(digits));
    }
}

double FixedPointFormat::bit_weight(int r) const noexcept {
    return sign(r) * std::ldexp(1.0, r - point_);
}

double FixedPointFormat::step() const noexcept { return std::ldexp(1.0, -point_); }

double FixedPointFormat::min_value() const noexcept { return -std::ldexp(1.0, digits_ - 1 - point_); }

double FixedPointFormat::max_value() const noexcept {
    return (std::ldexp(1.0, digits_ - 1) - 1.0) * std::ldexp(1.0, -point_);
}

Bits encode_coefficients(std::span<const double> coefficients, const FixedPointFormat& fmt) {
    const int d = fmt.digits();
    Bits bits(coefficients.size() * static_cast<std::size_t>(d), 0);
    const auto modulus = std::int64_t{1} << d;
    for (std::size_t j = 0; j < coefficients.size(); ++j) {
        const double c = coefficients[j];
        if (!(c >= fmt.min_value() && c <= fmt.max_value())) {
            throw OutOfRange("coefficient " + std::to_string(c) + " outside representable range [" +
                             std::to_string(fmt.min_value()) + ", " +
                             std::to_string(fmt.max_value()) + "]");
        }
        // Nearest integer multiple of 2^-p; exact halves go down.
        const auto k = static_cast<std::int64_t>(std::ceil(std::ldexp(c, fmt.point()) - 0.5));
        const auto u = static_cast<std::uint64_t>(((k % modulus) + modulus) % modulus);
        for (int r = 0; r < d; ++r) {
            bits[j * static_cast<std::size_t>(d) + static_cast<std::size_t>(r)] =
                static_cast<std::uint8_t>((u >> r) & 1U);
        }
    }
    return bits;
}

std::vector<double> decode_bits(std::span<const std::uint8_t> bits, const FixedPointFormat& fmt,
                                std::size_t m) {
    const auto d = static_cast<std::size_t>(fmt.digits());
    if (bits.size() != m * d) {
        throw ValidationError("decode_bits: expected " + std::to_string(m * d) + " bits, got " +
                              std::to_string(bits.size()));
    }
    std::vector<double> c(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t r = 0; r < d; ++r) {
            if (bits[j * d + r] != 0) {
                c[j] += fmt.bit_weight(static_cast<int>(r));
            }
        }
    }
    return c;
}

QuboProblem QuboProblem::from_matrix(Eigen::MatrixXd Q) {
    if (Q.rows() != Q.cols()) {
        throw ValidationError("QUBO matrix must be square");
    }
    if (!Q.allFinite()) {
        throw ValidationError("QUBO matrix contains non-finite entries");
    }
    QuboProblem q;
    q.m = static_cast<std::size_t>(Q.rows());
    q.Q = std::move(Q);
    return q;
}

double qubo_energy(const Eigen::MatrixXd& Q, std::span<const std::uint8_t> bits) {
    const auto n = Q.rows();
    if (static_cast<std::size_t>(n) != bits.size()) {
        throw ValidationError("qubo_energy: bit vector length does not match QUBO size");
    }
    double e = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (bits[static_cast<std::size_t>(i)] == 0) {
            continue;
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (bits[static_cast<std::size_t>(j)] != 0) {
                e += Q(i, j);
            }
        }
    }
    return e;
}

double qubo_energy(const QuboProblem& q, std::span<const std::uint8_t> bits) {
    return qubo_energy(q.Q, bits);
}

double IsingProblem::energy(std::span<const int> spins) const {
    const auto n = h.size();
    if (static_cast<std::size_t>(n) != spins.size()) {
        throw ValidationError("Ising energy: spin vector length mismatch");
    }
    double e = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double si = spins[static_cast<std::size_t>(i)];
        e += h[i] * si;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            e += J(i, j) * si * spins[static_cast<std::size_t>(j)];
        }
    }
    return e;
}

QuboProblem build_qubo(const NormalSystem& sys, const FixedPointFormat& fmt) {
    const auto m = sys.W.rows();
    if (sys.W.cols() != m || sys.b.size() != m) {
        throw ValidationError("build_qubo: inconsistent normal system");
    }
    const int d = fmt.digits();
    const int p = fmt.point();
    const Eigen::Index n = m * d;

    Eigen::MatrixXd Q(n, n);
    for (Eigen::Index mu = 0; mu < n; ++mu) {
        const Eigen::Index j = mu / d;
        const int r = static_cast<int>(mu % d);
        for (Eigen::Index nu = 0; nu < n; ++nu) {
            const Eigen::Index k = nu / d;
            const int s = static_cast<int>(nu % d);
            Q(mu, nu) = std::ldexp(fmt.sign(r) * fmt.sign(s) * sys.W(j, k), r + s - 2 * p);
        }
        // psi_mu^2 == psi_mu, so the linear term folds into the diagonal.
        Q(mu, mu) -= std::ldexp(fmt.sign(r) * sys.b(j), r - p + 1);
    }

    QuboProblem q;
    q.Q = std::move(Q);
    q.m = static_cast<std::size_t>(m);
    q.fmt = fmt;
    q.norm = sys.norm;
    return q;
}

QuboProblem upper_triangularize(const QuboProblem& q) {
    if (q.upper) {
        return q;
    }
    QuboProblem out = q;
    const auto n = q.Q.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out.Q(i, j) = q.Q(i, j) + q.Q(j, i);
            out.Q(j, i) = 0.0;
        }
    }
    out.upper = true;
    return out;
}

QuboProblem symmetrize(const QuboProblem& q) {
    QuboProblem out = q;
    out.Q = 0.5 * (q.Q + q.Q.transpose());
    out.Q.diagonal() = q.Q.diagonal();
    out.upper = false;
    return out;
}

IsingProblem to_ising(const QuboProblem& q) {
    const QuboProblem tri = upper_triangularize(q);
    const auto n = tri.Q.rows();
    IsingProblem ising;
    ising.J = Eigen::MatrixXd::Zero(n, n);
    ising.h = Eigen::VectorXd::Zero(n);
    // z_i = (s_i + 1) / 2:
    //   R_ii z_i     = R_ii s_i / 2 + R_ii / 2
    //   R_ij z_i z_j = R_ij (s_i s_j + s_i + s_j + 1) / 4
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rii = tri.Q(i, i);
        ising.h[i] += 0.5 * rii;
        ising.offset += 0.5 * rii;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double rij = tri.Q(i, j);
            if (rij == 0.0) {
                continue;
            }
            ising.J(i, j) = 0.25 * rij;
            ising.h[i] += 0.25 * rij;
            ising.h[j] += 0.25 * rij;
            ising.offset += 0.25 * rij;
        }
    }
    return ising;
}

double density(const QuboProblem& q) {
    const QuboProblem tri = upper_triangularize(q);
    const auto n = tri.Q.rows();
    if (n < 2) {
        return 0.0;
    }
    std::size_t nonzero = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (std::abs(tri.Q(i, j)) > 1e-12) {
                ++nonzero;
            }
        }
    }
    const auto slots = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return static_cast<double>(nonzero) / slots;
}

}  // namespace qubofit

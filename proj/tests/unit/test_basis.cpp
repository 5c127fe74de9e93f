#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qubofit/basis.hpp"
#include "qubofit/errors.hpp"

using namespace qubofit;
using doctest::Approx;

TEST_CASE("chebyshev values") {
    CHECK(chebyshev_t(0, 0.7) == 1.0);
    CHECK(chebyshev_t(1, 0.7) == 0.7);
    CHECK(chebyshev_t(2, 0.5) == Approx(-0.5).epsilon(1e-15));
    CHECK(chebyshev_t(3, 2.0) == Approx(26.0));  // 4x^3 - 3x outside [-1, 1]
    CHECK(std::isfinite(chebyshev_t(100000, 0.3)));
}

TEST_CASE("chebyshev bound on [-1, 1]") {
    for (std::size_t j = 0; j <= 20; ++j) {
        for (int i = 0; i <= 200; ++i) {
            const double x = -1.0 + i / 100.0;
            CHECK(std::abs(chebyshev_t(j, x)) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("chebyshev recurrence matches cos(j theta)") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> theta(0.0, std::numbers::pi);
    for (int k = 0; k < 100; ++k) {
        const double th = theta(rng);
        for (std::size_t j = 0; j <= 10; ++j) {
            CHECK(chebyshev_t(j, std::cos(th)) == Approx(std::cos(static_cast<double>(j) * th)).epsilon(1e-9));
            CHECK(std::abs(chebyshev_t(j, std::cos(th)) - oracle::chebyshev_trig(j, std::cos(th))) <= 1e-9);
        }
    }
}

TEST_CASE("triangular values") {
    const std::vector<double> knots{0.0, 0.5, 1.0};
    CHECK(triangular(1, 0.5, knots) == 1.0);
    CHECK(triangular(0, 0.5, knots) == 0.0);
    CHECK(triangular(1, 0.25, knots) == Approx(0.5));
    CHECK(triangular(2, 1.0, knots) == 1.0);
    CHECK(triangular(0, 0.0, knots) == 1.0);
    CHECK(triangular(0, -0.1, knots) == 0.0);
    CHECK(triangular(2, 1.1, knots) == 0.0);
}

TEST_CASE("triangular rejects bad knots and indices") {
    const std::vector<double> flat{0.0, 0.0, 1.0};
    CHECK_THROWS_AS(triangular(0, 0.5, flat), ValidationError);
    const std::vector<double> one{0.0};
    CHECK_THROWS_AS(triangular(0, 0.0, one), ValidationError);
    const std::vector<double> ok{0.0, 1.0};
    CHECK_THROWS_AS(triangular(2, 0.0, ok), ValidationError);
    CHECK_THROWS_AS(BasisSet::triangular({1.0, 0.5}), ValidationError);
}

TEST_CASE("partition of unity and compact support") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> gap(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> knots{-0.3};
        const std::size_t m = 2 + static_cast<std::size_t>(trial % 9);
        while (knots.size() < m) {
            knots.push_back(knots.back() + gap(rng));
        }
        const BasisSet basis = BasisSet::triangular(knots);
        for (int i = 0; i <= 400; ++i) {
            const double x = i == 400 ? knots.back() : knots.front() + (knots.back() - knots.front()) * i / 400.0;
            double sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double v = basis.eval(j, x);
                sum += v;
                const double lo = j == 0 ? knots[0] : knots[j - 1];
                const double hi = j + 1 == m ? knots[m - 1] : knots[j + 1];
                if (x < lo || x > hi) {
                    CHECK(v == 0.0);
                }
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("eval_basis dispatch") {
    const BasisSet cheb = BasisSet::chebyshev(3);
    CHECK(eval_basis(cheb, 0, 0.2) == 1.0);
    CHECK(eval_basis(cheb, 2, 0.2) == Approx(2 * 0.04 - 1));
    const BasisSet tri = BasisSet::triangular({0.0, 1.0});
    CHECK(eval_basis(tri, 0, 0.0) == 1.0);
    CHECK(eval_basis(tri, 1, 1.0) == 1.0);
    CHECK_THROWS_AS(eval_basis(tri, 2, 0.5), ValidationError);
    CHECK_THROWS_AS(BasisSet::chebyshev(0), ValidationError);
}

TEST_CASE("chebyshev remap is opt-in") {
    const BasisSet raw = BasisSet::chebyshev(3);
    const BasisSet mapped = BasisSet::chebyshev(3, ChebyshevDomain{0.0, 1.0});
    CHECK_FALSE(raw.remap().has_value());
    CHECK(raw.eval(1, 0.25) == 0.25);
    CHECK(mapped.eval(1, 0.25) == Approx(-0.5));
    CHECK(mapped.eval(2, 1.0) == Approx(1.0));
}

TEST_CASE("uniform knots") {
    CHECK(uniform_knots(0, 1, 2) == std::vector<double>{0.0, 1.0});
    CHECK(uniform_knots(0, 1, 3) == std::vector<double>{0.0, 0.5, 1.0});
    const auto k = uniform_knots(0, 100, 9);
    REQUIRE(k.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(k[i] == Approx(12.5 * static_cast<double>(i)));
    }
    CHECK(k.back() == 100.0);
    CHECK_THROWS_AS(uniform_knots(0, 1, 1), ValidationError);
    CHECK_THROWS_AS(uniform_knots(1, 1, 3), ValidationError);
}

TEST_CASE("eval_all agrees with eval") {
    const BasisSet tri = BasisSet::triangular_uniform(0.0, 2.0, 5);
    const BasisSet cheb = BasisSet::chebyshev(6);
    for (const BasisSet* b : {&tri, &cheb}) {
        for (double x : {0.0, 0.3, 0.77, 1.5, 2.0}) {
            const auto all = b->eval_all(x);
            for (std::size_t j = 0; j < b->size(); ++j) {
                CHECK(all[j] == b->eval(j, x));
            }
        }
    }
}

TEST_CASE("kind names") {
    CHECK(basis_kind_from_string("triangular") == BasisKind::Triangular);
    CHECK(basis_kind_from_string(to_string(BasisKind::Chebyshev)) == BasisKind::Chebyshev);
    CHECK_THROWS_AS(basis_kind_from_string("legendre"), ValidationError);
}

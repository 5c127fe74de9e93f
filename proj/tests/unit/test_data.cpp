#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qubofit/data.hpp"
#include "qubofit/errors.hpp"
#include "qubofit/io.hpp"
#include "qubofit/random.hpp"

using namespace qubofit;
using doctest::Approx;

TEST_CASE("noiseless generators") {
    GeneratorSpec g;
    g.n = 2;
    g.noise_sigma = 0.0;
    const Dataset lin = generate(g);
    CHECK(lin.xs()[0] == 0.0);
    CHECK(lin.xs()[1] == 1.0);
    CHECK(lin.ys()[0] == 1.0);
    CHECK(lin.ys()[1] == 1.5);

    g.kind = SampleKind::Trigonometric;
    g.n = 5;
    const Dataset trig = generate(g);
    CHECK(trig.xs()[1] == 0.25);
    CHECK(std::abs(trig.ys()[1]) <= 1e-15);

    g.kind = SampleKind::CustomPolynomial;
    g.coeffs = {1.0 / 3.0, -0.25};
    g.n = 3;
    const Dataset custom = generate(g);
    CHECK(custom.ys()[2] == Approx(1.0 / 3.0 - 0.25));

    g.kind = SampleKind::Cubic;
    CHECK(sample_curve(g, 0.5) == Approx(0.75 * 0.125 + 0.125));
    g.kind = SampleKind::Quadratic;
    CHECK(sample_curve(g, 0.5) == Approx(0.1875));
}

TEST_CASE("generator validation") {
    GeneratorSpec g;
    g.n = 1;
    CHECK_THROWS_AS(generate(g), ValidationError);
    g.n = 10;
    g.noise_sigma = -1.0;
    CHECK_THROWS_AS(generate(g), ValidationError);
    g.noise_sigma = 0.0;
    g.kind = SampleKind::CustomPolynomial;
    CHECK_THROWS_AS(generate(g), ValidationError);
    CHECK_THROWS_AS(sample_kind_from_string("sawtooth"), ValidationError);
}

TEST_CASE("noise is reproducible and seed dependent") {
    GeneratorSpec g;
    g.kind = SampleKind::Cubic;
    g.seed = 17;
    const std::string a = io::dataset_csv(generate(g));
    CHECK(a == io::dataset_csv(generate(g)));
    g.seed = 18;
    CHECK(a != io::dataset_csv(generate(g)));
}

TEST_CASE("noise has the requested scale") {
    GeneratorSpec g;
    g.n = 20000;
    g.noise_sigma = 0.03;
    g.seed = 5;
    const Dataset d = generate(g);
    double s = 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = d.ys()[i] - sample_curve(g, d.xs()[i]);
        s += r;
        ss += r * r;
    }
    const double n = static_cast<double>(d.size());
    CHECK(std::abs(s / n) < 1e-3);
    CHECK(std::sqrt(ss / n) == Approx(0.03).epsilon(0.03));
}

TEST_CASE("minmax_normalize") {
    const Dataset d = minmax_normalize(Dataset({0.0, 1.0}, {1.0, 3.0}));
    CHECK(d.ys()[0] == 0.0);
    CHECK(d.ys()[1] == 1.0);
    REQUIRE(d.norm().has_value());
    CHECK(d.norm()->y_min == 1.0);
    CHECK(d.norm()->y_max == 3.0);
    CHECK(d.norm()->denormalize(0.5) == 2.0);

    const Dataset unit = minmax_normalize(Dataset({0.0, 0.5, 1.0}, {0.0, 0.25, 1.0}));
    CHECK(unit.ys()[1] == 0.25);

    CHECK_THROWS_AS(minmax_normalize(Dataset({0.0, 1.0}, {2.0, 2.0})), DegenerateRange);
}

TEST_CASE("ape") {
    CHECK(ape(0.010664, 0.010742) == Approx(0.7314).epsilon(1e-3));
    CHECK(ape(1.5, 1.5) == 0.0);
    CHECK(ape(0.0, 1e-15, 1e-12) == Approx(0.1));
    CHECK_THROWS_AS(ape(1.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("rmse and mse") {
    const std::vector<double> xs{0.0, 0.25, 0.5, 0.75, 1.0};
    const std::vector<double> ys{1.0, 4.0, 2.0, 0.5, 3.0};
    const Dataset d(xs, ys);

    SUBCASE("constant fit gives the population standard deviation") {
        const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / 5.0;
        double var = 0.0;
        for (double y : ys) {
            var += (y - mean) * (y - mean);
        }
        var /= 5.0;
        const FitResult fit{Eigen::VectorXd::Constant(1, mean), BasisSet::chebyshev(1), std::nullopt};
        CHECK(rmse(fit, d) == Approx(std::sqrt(var)).epsilon(1e-14));
        CHECK(std::abs(mse(fit, d) - rmse(fit, d) * rmse(fit, d)) <= 1e-12);
    }
    SUBCASE("noiseless linear data is exactly representable") {
        GeneratorSpec g;
        g.noise_sigma = 0.0;
        const Dataset lin = generate(g);
        const FitResult fit = solve_classical(assemble(lin, BasisSet::triangular_uniform(0, 1, 2)));
        CHECK(rmse(fit, lin) <= 1e-10);
        CHECK(mse(fit, lin) <= 1e-20);
    }
    SUBCASE("fixed residual") {
        const Dataset flat({0.0, 1.0}, {0.1, -0.1});
        const FitResult zero{Eigen::VectorXd::Zero(1), BasisSet::chebyshev(1), std::nullopt};
        CHECK(rmse(zero, flat) == Approx(0.1));
        CHECK(mse(zero, flat) == Approx(0.01));
    }
}

TEST_CASE("describe records the generator") {
    GeneratorSpec g;
    g.kind = SampleKind::Quadratic;
    g.n = 16;
    g.seed = 9;
    const Dataset d = minmax_normalize(generate(g));
    const DatasetMeta meta = describe(g, d);
    CHECK(meta.kind == "quadratic");
    CHECK(meta.n == 16);
    CHECK(meta.seed == 9);
    CHECK(meta.sigma == 0.03);
    CHECK(meta.y_min.has_value());
    CHECK(meta.generator == kNoiseGenerator);
}

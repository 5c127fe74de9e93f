#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "qubofit/errors.hpp"
#include "qubofit/io.hpp"
#include "qubofit/solvers.hpp"

using namespace qubofit;
namespace fs = std::filesystem;

namespace {

const std::string kStubs = QUBOFIT_STUB_DIR;

// A reply file in a per-test scratch directory.
struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("qubofit-external-" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string reply(const io::json& j, const std::string& name = "reply.json") const {
        io::write_text(dir / name, j.dump());
        return (dir / name).string();
    }
};

io::json sample(const Bits& bits, double energy) {
    return io::json{{"bits", bits}, {"energy", energy}};
}

std::string reply_command(const std::string& file) { return "sh " + kStubs + "/reply.sh " + file; }

}  // namespace

TEST_CASE("all-zero reply on a zero matrix") {
    Scratch s;
    const QuboProblem q = QuboProblem::from_matrix(Eigen::MatrixXd::Zero(3, 3));
    const auto file = s.reply(io::json::array({sample(Bits(3, 0), 0.0)}));
    const SolveResult r = external_sample(q, reply_command(file));
    CHECK(r.energy == 0.0);
    CHECK(r.bits == Bits(3, 0));
    CHECK(r.solver == "external");
}

TEST_CASE("reply holding the exact optimum equals brute force") {
    Scratch s;
    std::mt19937_64 rng(6);
    const QuboProblem q = QuboProblem::from_matrix(oracle::random_symmetric(8, rng));
    const SolveResult exact = brute_force(q);
    io::json samples = io::json::array();
    samples.push_back(sample(Bits(8, 0), 0.0));
    samples.push_back(sample(exact.bits, exact.energy));
    const SolveResult r = external_sample(q, reply_command(s.reply(samples)));
    CHECK(r.bits == exact.bits);
    CHECK(r.energy == exact.energy);
    CHECK(r.samples_evaluated == 2);
}

TEST_CASE("request file carries the problem") {
    Scratch s;
    std::mt19937_64 rng(7);
    const QuboProblem q = QuboProblem::from_matrix(oracle::random_symmetric(5, rng));
    const auto reply = s.reply(io::json::array({sample(Bits(5, 0), 0.0)}));
    const auto saved = (s.dir / "request.json").string();
    external_sample(q, "sh " + kStubs + "/copy_request.sh " + saved + " " + reply);
    const QuboProblem back = io::qubo_from_json(io::json::parse(io::read_text(saved)));
    CHECK((symmetrize(back).Q - q.Q).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("bad replies") {
    Scratch s;
    Eigen::MatrixXd m(2, 2);
    m << 1, 0, 0, -1;
    const QuboProblem q = QuboProblem::from_matrix(m);
    SUBCASE("wrong energy") {
        const auto f = s.reply(io::json::array({sample(Bits{0, 1}, 5.0)}));
        CHECK_THROWS_AS(external_sample(q, reply_command(f)), EnergyMismatch);
    }
    SUBCASE("wrong length") {
        const auto f = s.reply(io::json::array({sample(Bits{1}, 1.0)}));
        CHECK_THROWS_AS(external_sample(q, reply_command(f)), ExternalFailure);
    }
    SUBCASE("not json") {
        io::write_text(s.dir / "junk.txt", "hello");
        CHECK_THROWS_AS(external_sample(q, reply_command((s.dir / "junk.txt").string())), ExternalFailure);
    }
    SUBCASE("empty array") {
        CHECK_THROWS_AS(external_sample(q, reply_command(s.reply(io::json::array()))), ExternalFailure);
    }
    SUBCASE("non-binary bits") {
        const auto f = s.reply(io::json::array({io::json{{"bits", {0, 2}}, {"energy", 0.0}}}));
        CHECK_THROWS_AS(external_sample(q, reply_command(f)), ExternalFailure);
    }
    SUBCASE("failing program") {
        CHECK_THROWS_AS(external_sample(q, "false"), ExternalFailure);
        CHECK_THROWS_AS(external_sample(q, "/nonexistent/sampler"), ExternalFailure);
    }
    SUBCASE("empty command") {
        CHECK_THROWS_AS(external_sample(q, "  "), ValidationError);
    }
}

TEST_CASE("external backend through solve_qubo") {
    Scratch s;
    Eigen::MatrixXd m(1, 1);
    m << -2.0;
    const QuboProblem q = QuboProblem::from_matrix(m);
    const auto f = s.reply(io::json::array({sample(Bits{1}, -2.0)}));
    const SolveResult r = solve_qubo(q, SolverConfig{Backend::External, {}, reply_command(f)});
    CHECK(r.bits == Bits{1});
}

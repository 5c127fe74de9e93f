#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "qubofit/errors.hpp"
#include "qubofit/io.hpp"
#include "qubofit/solvers.hpp"

namespace qubofit {

namespace {

// Temporary request file, removed on scope exit.
class TempFile {
public:
    TempFile() {
        const char* dir = std::getenv("TMPDIR");
        std::string pattern = std::string(dir && *dir ? dir : "/tmp") + "/qubofit-request-XXXXXX";
        std::vector<char> buf(pattern.begin(), pattern.end());
        buf.push_back('\0');
        const int fd = ::mkstemp(buf.data());
        if (fd < 0) {
            throw ExternalFailure(std::string("cannot create request file: ") + std::strerror(errno));
        }
        ::close(fd);
        path_ = buf.data();
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

std::vector<std::string> split_command(const std::string& command) {
    std::istringstream is(command);
    std::vector<std::string> argv;
    for (std::string tok; is >> tok;) {
        argv.push_back(tok);
    }
    return argv;
}

// Runs argv, returns its stdout. Throws ExternalFailure on a nonzero exit.
std::string run_capture(std::vector<std::string> argv) {
    int pipefd[2];
    if (::pipe(pipefd) != 0) {
        throw ExternalFailure(std::string("pipe failed: ") + std::strerror(errno));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
        ::close(pipefd[0]);
        ::close(pipefd[1]);
        throw ExternalFailure(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::dup2(pipefd[1], STDOUT_FILENO);
        ::close(pipefd[0]);
        ::close(pipefd[1]);
        std::vector<char*> args;
        for (auto& a : argv) {
            args.push_back(a.data());
        }
        args.push_back(nullptr);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    ::close(pipefd[1]);
    std::string out;
    char buf[4096];
    for (;;) {
        const ssize_t got = ::read(pipefd[0], buf, sizeof buf);
        if (got > 0) {
            out.append(buf, static_cast<std::size_t>(got));
        } else if (got == 0 || errno != EINTR) {
            break;
        }
    }
    ::close(pipefd[0]);
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        throw ExternalFailure("external sampler '" + argv[0] + "' exited with status " +
                              std::to_string(code));
    }
    return out;
}

}  // namespace

SolveResult external_sample(const QuboProblem& q, const std::string& command) {
    auto argv = split_command(command);
    if (argv.empty()) {
        throw ValidationError("empty external sampler command");
    }
    TempFile request;
    io::write_text(request.path(), io::qubo_to_json(q).dump());
    argv.push_back(request.path());
    const std::string reply = run_capture(std::move(argv));

    io::json samples;
    try {
        samples = io::json::parse(reply);
    } catch (const io::json::exception& e) {
        throw ExternalFailure(std::string("external sampler reply is not JSON: ") + e.what());
    }
    if (!samples.is_array() || samples.empty()) {
        throw ExternalFailure("external sampler reply must be a nonempty JSON array");
    }

    SolveResult best;
    best.solver = "external";
    const std::size_t n = q.size();
    for (const auto& s : samples) {
        Bits bits;
        double reported = 0.0;
        try {
            for (const auto& b : s.at("bits")) {
                const int v = b.get<int>();
                if (v != 0 && v != 1) {
                    throw ExternalFailure("sample bits must be 0 or 1");
                }
                bits.push_back(static_cast<std::uint8_t>(v));
            }
            reported = s.at("energy").get<double>();
        } catch (const io::json::exception& e) {
            throw ExternalFailure(std::string("malformed sample: ") + e.what());
        }
        if (bits.size() != n) {
            throw ExternalFailure("sample has " + std::to_string(bits.size()) + " bits, expected " +
                                  std::to_string(n));
        }
        const double energy = qubo_energy(q, bits);
        if (!(std::abs(reported - energy) <= kExternalEnergyTolerance)) {
            throw EnergyMismatch("sample reports energy " + io::number(reported) +
                                 " but its bits give " + io::number(energy));
        }
        ++best.samples_evaluated;
        if (best.bits.empty() || energy < best.energy ||
            (energy == best.energy && bits < best.bits)) {
            best.energy = energy;
            best.bits = std::move(bits);
        }
    }
    return best;
}

}  // namespace qubofit

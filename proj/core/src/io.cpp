#include "qubofit/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "qubofit/errors.hpp"

namespace qubofit::io {

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != header.size()) {
        throw ValidationError("CSV row width does not match the header");
    }
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto& r : rows) {
        line(r);
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    os << text;
    if (!os) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw ValidationError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json qubo_to_json(const QuboProblem& q) {
    const QuboProblem tri = upper_triangularize(q);
    const auto n = tri.Q.rows();
    json entries = json::array();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            if (tri.Q(i, j) != 0.0) {
                entries.push_back(json::array({i, j, tri.Q(i, j)}));
            }
        }
    }
    json meta = {{"m", q.m}, {"d", q.fmt.digits()}, {"p", q.fmt.point()}};
    meta["y_min"] = q.norm ? json(q.norm->y_min) : json(nullptr);
    meta["y_max"] = q.norm ? json(q.norm->y_max) : json(nullptr);
    return json{{"n", n}, {"entries", std::move(entries)}, {"meta", std::move(meta)}};
}

QuboProblem qubo_from_json(const json& j) {
    try {
        const auto n = j.at("n").get<Eigen::Index>();
        if (n < 0) {
            throw ValidationError("QUBO dimension must be >= 0");
        }
        Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
        for (const auto& e : j.at("entries")) {
            if (!e.is_array() || e.size() != 3) {
                throw ValidationError("QUBO entry must be [row, col, value]");
            }
            auto r = e[0].get<Eigen::Index>();
            auto c = e[1].get<Eigen::Index>();
            if (r < 0 || c < 0 || r >= n || c >= n) {
                throw ValidationError("QUBO entry index out of range");
            }
            if (r > c) {
                std::swap(r, c);
            }
            Q(r, c) += e[2].get<double>();
        }
        QuboProblem q = QuboProblem::from_matrix(std::move(Q));
        q.upper = true;
        if (j.contains("meta")) {
            const auto& meta = j["meta"];
            const auto m = meta.at("m").get<std::size_t>();
            const FixedPointFormat fmt(meta.at("d").get<int>(), meta.at("p").get<int>());
            if (m * static_cast<std::size_t>(fmt.digits()) != static_cast<std::size_t>(n)) {
                throw ValidationError("QUBO meta: m * d does not equal n");
            }
            q.m = m;
            q.fmt = fmt;
            if (meta.contains("y_min") && !meta["y_min"].is_null()) {
                q.norm = Normalization{meta["y_min"].get<double>(), meta.at("y_max").get<double>()};
            }
        }
        return q;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed QUBO JSON: ") + e.what());
    }
}

json to_json(const SolveResult& r) {
    return json{{"bits", r.bits},       {"energy", r.energy}, {"samples_evaluated", r.samples_evaluated},
                {"solver", r.solver},   {"seed", r.seed}};
}

json to_json(const FitResult& fit) {
    json j{{"basis", to_string(fit.basis.kind())},
           {"m", fit.basis.size()},
           {"coefficients", std::vector<double>(fit.coefficients.begin(), fit.coefficients.end())}};
    if (fit.basis.kind() == BasisKind::Triangular) {
        const auto k = fit.basis.knots();
        j["knots"] = std::vector<double>(k.begin(), k.end());
    }
    if (fit.norm) {
        j["y_min"] = fit.norm->y_min;
        j["y_max"] = fit.norm->y_max;
    }
    return j;
}

json to_json(const Policy& policy) {
    return json{{"actions", policy.actions}, {"states", policy.states}, {"total_cost", policy.total_cost}};
}

json to_json(const DatasetMeta& meta) {
    json j{{"kind", meta.kind}, {"n", meta.n}, {"sigma", meta.sigma}, {"seed", meta.seed},
           {"generator", meta.generator}};
    j["y_min"] = meta.y_min ? json(*meta.y_min) : json(nullptr);
    j["y_max"] = meta.y_max ? json(*meta.y_max) : json(nullptr);
    return j;
}

DatasetMeta dataset_meta_from_json(const json& j) {
    try {
        DatasetMeta meta;
        meta.kind = j.at("kind").get<std::string>();
        meta.n = j.at("n").get<std::size_t>();
        meta.sigma = j.at("sigma").get<double>();
        meta.seed = j.at("seed").get<std::uint64_t>();
        meta.generator = j.value("generator", std::string{});
        if (j.contains("y_min") && !j["y_min"].is_null()) {
            meta.y_min = j["y_min"].get<double>();
            meta.y_max = j.at("y_max").get<double>();
        }
        return meta;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed dataset metadata: ") + e.what());
    }
}

json to_json(const JitScenario& s) {
    return json{{"ell", s.ell},
                {"v_max", s.v_max},
                {"T", s.horizon},
                {"alpha", s.alpha},
                {"x0", s.x0},
                {"n_states", s.n_states},
                {"grid_actions", s.grid_actions},
                {"n_actions", s.n_actions},
                {"n_samples", s.n_samples},
                {"m", s.m},
                {"d", s.d},
                {"p", s.p},
                {"backend", to_string(s.backend)},
                {"seed", s.seed}};
}

JitScenario scenario_from_json(const json& j) {
    if (!j.is_object()) {
        throw ValidationError("scenario must be a JSON object");
    }
    static const std::set<std::string> known{
        "ell", "v_max", "T", "alpha", "x0", "n_states", "grid_actions",
        "n_actions", "n_samples", "m", "d", "p", "backend", "seed"};
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) {
            throw ValidationError("unknown scenario key '" + key + "'");
        }
    }
    JitScenario s;
    try {
        s.ell = j.value("ell", s.ell);
        s.v_max = j.value("v_max", s.v_max);
        s.horizon = j.value("T", s.horizon);
        s.alpha = j.value("alpha", s.alpha);
        s.x0 = j.value("x0", s.x0);
        s.n_states = j.value("n_states", s.n_states);
        s.grid_actions = j.value("grid_actions", s.grid_actions);
        s.n_actions = j.value("n_actions", s.n_actions);
        s.n_samples = j.value("n_samples", s.n_samples);
        s.m = j.value("m", s.m);
        s.d = j.value("d", s.d);
        s.p = j.value("p", s.p);
        s.seed = j.value("seed", s.seed);
        if (j.contains("backend")) {
            s.backend = backend_from_string(j["backend"].get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed scenario: ") + e.what());
    }
    s.params().validate();
    if (s.horizon < 1 || s.m < 2 || s.n_samples < s.m || s.n_states < 2 || s.grid_actions < 2 ||
        s.n_actions < 2) {
        throw ValidationError("scenario needs T >= 1, m >= 2, n_samples >= m, grids >= 2");
    }
    FixedPointFormat(s.d, s.p);
    if (!(s.x0 >= 0.0 && s.x0 <= s.ell)) {
        throw ValidationError("scenario x0 must lie in [0, ell]");
    }
    return s;
}

std::string dataset_csv(const Dataset& data) {
    std::string out = "x,y\n";
    const auto xs = data.xs();
    const auto ys = data.ys();
    for (std::size_t i = 0; i < data.size(); ++i) {
        out += number(xs[i]);
        out += ',';
        out += number(ys[i]);
        out += '\n';
    }
    return out;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
    write_text(path, dataset_csv(data));
}

Dataset read_dataset_csv(const std::filesystem::path& path, std::optional<Normalization> norm) {
    std::istringstream is(read_text(path));
    std::string line;
    if (!std::getline(is, line) || line.rfind("x,y", 0) != 0) {
        throw ValidationError(path.string() + ": expected header 'x,y'");
    }
    std::vector<double> xs;
    std::vector<double> ys;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) {
                throw std::invalid_argument("missing comma");
            }
            xs.push_back(std::stod(line.substr(0, comma)));
            ys.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        }
    }
    return Dataset(std::move(xs), std::move(ys), norm);
}

std::string qubo_heatmap_csv(const QuboProblem& q) {
    const QuboProblem tri = upper_triangularize(q);
    std::string out = "row,col,value\n";
    const auto n = tri.Q.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            out += std::to_string(i);
            out += ',';
            out += std::to_string(j);
            out += ',';
            out += number(tri.Q(i, j));
            out += '\n';
        }
    }
    return out;
}

}  // namespace qubofit::io

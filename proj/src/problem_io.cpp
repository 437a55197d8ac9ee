#include "lqgame/problem_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lqgame {

using nlohmann::json;

Matrix json_to_matrix(const json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) throw ParseError("key '" + key + "' must be a non-empty list of rows");
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw ParseError("key '" + key + "' must hold non-empty row lists");
    Matrix m(static_cast<int>(j.size()), static_cast<int>(cols));
    int i = 0;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols)
            throw ParseError("key '" + key + "' has a ragged row at index " + std::to_string(i));
        int c = 0;
        for (const auto& v : row) {
            if (!v.is_number()) throw ParseError("key '" + key + "' has a non-numeric entry");
            m(i, c++) = v.get<double>();
        }
        ++i;
    }
    try {
        m.check_finite(key.c_str());
    } catch (const NonFiniteValue&) {
        throw ParseError("key '" + key + "' has a non-finite entry");
    }
    return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json matrix_to_json(const SymmetricMatrix& m) { return matrix_to_json(m.mat()); }

namespace {

Vector json_to_vector(const json& j, const std::string& key) {
    if (!j.is_array()) throw ParseError("key '" + key + "' must be a list of numbers");
    Vector v;
    v.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw ParseError("key '" + key + "' has a non-numeric entry");
        const double x = e.get<double>();
        if (!std::isfinite(x)) throw ParseError("key '" + key + "' has a non-finite entry");
        v.push_back(x);
    }
    return v;
}

}  // namespace

ProblemFile parse_problem_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON document: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("problem document must be a JSON object");

    ProblemFile pf;
    if (j.contains("q")) {
        if (!j["q"].is_number()) throw ParseError("key 'q' must be a number");
        for (const char* key : {"A", "B", "Bw", "Q", "R"})
            if (j.contains(key)) throw ParseError(std::string("key '") + key + "' conflicts with the scalar shortcut 'q'");
        const double qv = j["q"].get<double>();
        pf.q_shortcut = qv;
        pf.a = Matrix{{1.0}};
        pf.b = Matrix{{1.0}};
        pf.bw = Matrix{{1.0}};
        pf.q = SymmetricMatrix{{qv}};
        pf.r = SymmetricMatrix{{1.0}};
        pf.gamma = 2.0;
        if (!j.contains("x0")) pf.x0 = Vector{1.0};
    } else {
        for (const char* key : {"A", "B", "Q", "R"})
            if (!j.contains(key)) throw ParseError(std::string("missing required key '") + key + "'");
        pf.a = json_to_matrix(j["A"], "A");
        pf.b = json_to_matrix(j["B"], "B");
        pf.q = SymmetricMatrix(json_to_matrix(j["Q"], "Q"));
        pf.r = SymmetricMatrix(json_to_matrix(j["R"], "R"));
        pf.bw = j.contains("Bw") ? json_to_matrix(j["Bw"], "Bw") : Matrix::zeros(pf.a.rows(), 0);
    }
    if (j.contains("gamma")) {
        if (!j["gamma"].is_number()) throw ParseError("key 'gamma' must be a number");
        const double g = j["gamma"].get<double>();
        if (!(g > 0.0) || !std::isfinite(g)) throw ParseError("key 'gamma' must be a positive number");
        pf.gamma = g;
    }
    if (j.contains("x0")) {
        pf.x0 = json_to_vector(j["x0"], "x0");
        pf.x0_explicit = true;
    }
    return pf;
}

ProblemFile load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str());
}

namespace {

SystemData assemble(const ProblemFile& pf, Vector x0) {
    SystemData sys;
    sys.a = pf.a;
    sys.b = pf.b;
    sys.bw = pf.bw;
    sys.q = pf.q;
    sys.r = pf.r;
    sys.gamma = pf.gamma.value();
    sys.x0 = std::move(x0);
    try {
        sys.validate();
    } catch (const DimensionMismatch& e) {
        throw ParseError(std::string("inconsistent problem data: ") + e.what());
    }
    return sys;
}

}  // namespace

SystemData make_system(const ProblemFile& pf) {
    if (!pf.gamma) throw ParseError("missing required key 'gamma'");
    if (!pf.x0) throw ParseError("missing required key 'x0'");
    return assemble(pf, *pf.x0);
}

SystemData make_system_zero_state(const ProblemFile& pf, std::optional<double> gamma_override) {
    if (!pf.gamma && !gamma_override) throw ParseError("missing required key 'gamma'");
    if (pf.x0_explicit) {
        for (double v : *pf.x0)
            if (v != 0.0) throw NonzeroInitialState("H-infinity commands require x0 omitted or zero");
    }
    ProblemFile with_gamma = pf;
    if (gamma_override) with_gamma.gamma = *gamma_override;
    return assemble(with_gamma, Vector(static_cast<std::size_t>(pf.a.rows()), 0.0));
}

}  // namespace lqgame

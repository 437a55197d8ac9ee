#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "lqgame/riccati.hpp"

namespace lqgame {

/// Parsed problem document. Keys A, B, Bw, Q, R hold row lists, gamma a
/// number, x0 a flat list. The scalar shortcut key q expands to the unit
/// system A=B=Bw=[[1]], Q=[[q]], R=[[1]], gamma=2, x0=[1]; gamma and x0 may
/// still be given explicitly next to q.
struct ProblemFile {
    Matrix a, b, bw;
    SymmetricMatrix q, r;
    std::optional<double> gamma;
    std::optional<Vector> x0;
    bool x0_explicit = false;  // x0 appeared in the document (vs. shortcut default)
    std::optional<double> q_shortcut;
};

ProblemFile parse_problem_text(const std::string& text);
ProblemFile load_problem_file(const std::string& path);

/// Assembles a validated SystemData; gamma and x0 must be present.
SystemData make_system(const ProblemFile& pf);

/// Variant for the H-infinity commands: x0 is forced to zero, an explicit
/// nonzero x0 in the file is rejected, and a missing gamma may be supplied by
/// the caller (the --gamma flag).
SystemData make_system_zero_state(const ProblemFile& pf, std::optional<double> gamma_override = std::nullopt);

nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json matrix_to_json(const SymmetricMatrix& m);
Matrix json_to_matrix(const nlohmann::json& j, const std::string& key);

}  // namespace lqgame

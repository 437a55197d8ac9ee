#include "lqgame/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lqgame/game.hpp"
#include "lqgame/hinf.hpp"
#include "lqgame/problem_io.hpp"
#include "lqgame/sdp.hpp"

namespace lqgame::cli {

using nlohmann::json;

namespace {

double elapsed_seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json kkt_to_json(const KktReport& rep) {
    return json{{"primal_residual", rep.primal_residual},
                {"dual_min_eig", rep.dual_min_eig},
                {"slackness", rep.slackness},
                {"verdict", rep.verdict}};
}

json are_to_json(const AreSolution& are) {
    return json{{"P", matrix_to_json(are.p)},
                {"residual_norm", are.residual_norm},
                {"is_stabilizing", are.is_stabilizing},
                {"is_psd", are.is_psd},
                {"regularity", are.regularity},
                {"regularity_margin", are.regularity_margin}};
}

json value_report_to_json(const ValueReport& rep, const GameSolveOptions& opts, double wall_s) {
    json j{{"status", rep.saddle_certified ? "saddle_certified" : "partial_certificate"},
           {"value", rep.value},
           {"upper_sdp_value", rep.upper_sdp_value},
           {"policies", {{"K", matrix_to_json(rep.policies.k)}, {"L", matrix_to_json(rep.policies.l)}}},
           {"regularity", rep.regularity},
           {"are", are_to_json(rep.are)},
           {"kkt_upper", kkt_to_json(rep.kkt_upper)},
           {"saddle_certified", rep.saddle_certified},
           {"solver", {{"ipm_iterations", rep.ipm_iterations}, {"wall_time_s", wall_s}}},
           {"flags", {{"tol", opts.ipm_tol}, {"cert_tol", opts.cert_tol}, {"value_tol", opts.value_tol}}}};
    if (rep.lower_sdp_value) j["lower_sdp_value"] = *rep.lower_sdp_value;
    if (rep.upper_dual_value) j["upper_dual_value"] = *rep.upper_dual_value;
    if (rep.lower_dual_value) j["lower_dual_value"] = *rep.lower_dual_value;
    if (rep.kkt_lower) j["kkt_lower"] = kkt_to_json(*rep.kkt_lower);
    return j;
}

int emit(std::ostream& out, const json& j) {
    out << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_solve(const std::string& path, const GameSolveOptions& opts, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemData sys = make_system(load_problem_file(path));
    const ValueReport rep = solve_game(sys, opts);
    json j = value_report_to_json(rep, opts, elapsed_seconds(t0));
    j["command"] = "solve";
    emit(out, j);
    if (rep.saddle_certified) return kExitOk;
    return rep.kkt_upper.verdict ? kExitPartial : kExitError;
}

int cmd_kkt(const std::string& path, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemData sys = make_system(load_problem_file(path));
    const GameSolveOptions opts;
    const ValueReport rep = solve_game(sys, opts);

    json j{{"command", "kkt"},
           {"value", rep.value},
           {"upper", kkt_to_json(rep.kkt_upper)},
           {"regularity", rep.regularity},
           {"flags", {{"tol", opts.ipm_tol}, {"cert_tol", opts.cert_tol}}},
           {"solver", {{"ipm_iterations", rep.ipm_iterations}, {"wall_time_s", elapsed_seconds(t0)}}}};
    if (rep.kkt_lower)
        j["lower"] = kkt_to_json(*rep.kkt_lower);
    else
        j["lower"] = json{{"regularity_violated", true}};
    emit(out, j);
    if (rep.kkt_lower && rep.kkt_lower->verdict && rep.kkt_upper.verdict) return kExitOk;
    return rep.kkt_upper.verdict ? kExitPartial : kExitError;
}

int cmd_lqr(const std::string& path, double tol, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const ProblemFile pf = load_problem_file(path);
    if (!pf.x0) throw ParseError("missing required key 'x0'");
    const AreSolution are = solve_lqr_are(pf.a, pf.b, pf.q, pf.r);
    Matrix k = Matrix::zeros(pf.b.cols(), pf.a.rows());
    if (pf.b.cols() > 0) k = -lu_solve(pf.r.mat(), pf.b.transpose() * are.p.mat());

    const SdpProblem sdp = build_lqr_sdp(pf.a, pf.b, pf.q, pf.r, *pf.x0);
    const SdpSolution sol = solve_ipm(sdp, tol);

    json j{{"command", "lqr"},
           {"P", matrix_to_json(are.p)},
           {"K", matrix_to_json(k)},
           {"value", quadratic_form(are.p, *pf.x0)},
           {"sdp_value", sol.primal_obj},
           {"sdp_gap", sol.gap},
           {"residual_norm", are.residual_norm},
           {"is_stabilizing", are.is_stabilizing},
           {"solver", {{"ipm_iterations", sol.iterations}, {"wall_time_s", elapsed_seconds(t0)}}},
           {"flags", {{"tol", tol}}}};
    return emit(out, j);
}

int cmd_hinf_single(const std::string& path, double gamma, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemData sys = make_system_zero_state(load_problem_file(path), gamma);
    const HinfCertificate cert = certify(sys, gamma);
    json j{{"command", "hinf"},
           {"mode", "single"},
           {"gamma", gamma},
           {"certified", cert.certified},
           {"solver", {{"wall_time_s", elapsed_seconds(t0)}}}};
    if (cert.certified) {
        j["P"] = matrix_to_json(cert.p);
        j["K"] = matrix_to_json(cert.k);
        j["sweep_norm"] = cert.sweep_norm;
        j["margin"] = cert.margin;
    }
    emit(out, j);
    return cert.certified ? kExitOk : kExitPartial;
}

int cmd_hinf_bisect(const std::string& path, double lo, double hi, double tol, std::ostream& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemData sys = make_system_zero_state(load_problem_file(path), lo);
    const BisectResult res = bisect_gamma(sys, lo, hi, tol);
    json trace = json::array();
    for (const BisectProbe& p : res.trace) trace.push_back(json{{"gamma", p.gamma}, {"certified", p.certified}});
    json j{{"command", "hinf"},
           {"mode", "bisect"},
           {"gamma_hat", res.gamma_hat},
           {"bracket_trace", trace},
           {"flags", {{"lo", lo}, {"hi", hi}, {"tol", tol}}},
           {"solver", {{"wall_time_s", elapsed_seconds(t0)}}}};
    return emit(out, j);
}

int cmd_landscape(const std::string& path, double k_lo, double k_hi, double l_lo, double l_hi, int steps,
                  double clip, std::ostream& out) {
    const SystemData sys = make_system(load_problem_file(path));
    const std::vector<LandscapePoint> grid = landscape_grid(sys, k_lo, k_hi, l_lo, l_hi, steps, clip);

    // Fixed locale-independent formatting, 9 significant digits.
    char buf[128];
    out << "K,L,J\n";
    for (const LandscapePoint& p : grid) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g", p.k, p.l, p.j);
        out << buf << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"zero-sum LQ differential game and H-infinity certification toolkit"};
    app.require_subcommand(1);

    std::string file;
    double tol = 1e-8;
    GameSolveOptions game_opts;

    auto* solve = app.add_subcommand("solve", "solve the game and certify the saddle point");
    solve->add_option("file", file, "problem file (JSON)")->required();
    solve->add_option("--tol", game_opts.ipm_tol, "SDP solve tolerance");
    solve->add_option("--cert-tol", game_opts.cert_tol, "KKT certificate tolerance");
    solve->add_option("--value-tol", game_opts.value_tol, "upper/lower value comparison tolerance");

    auto* kkt = app.add_subcommand("kkt", "report KKT residuals for both primal-dual pairs");
    kkt->add_option("file", file, "problem file (JSON)")->required();

    auto* lqr = app.add_subcommand("lqr", "solve the LQR subproblem and its value SDP");
    lqr->add_option("file", file, "problem file (JSON)")->required();
    lqr->add_option("--tol", tol, "SDP solve tolerance");

    double gamma = 0.0, lo = 0.0, hi = 0.0;
    double hinf_tol = 1e-3;
    auto* hinf = app.add_subcommand("hinf", "H-infinity certification at a level or by bisection");
    hinf->add_option("file", file, "problem file (JSON)")->required();
    auto* gamma_opt = hinf->add_option("--gamma", gamma, "certification level");
    auto* bisect_opt = hinf->add_option("--bisect", [&lo, &hi](const CLI::results_t& vals) {
        lo = std::stod(vals.at(0));
        hi = std::stod(vals.at(1));
        return true;
    }, "bracket lo hi for bisection");
    bisect_opt->expected(2);
    gamma_opt->excludes(bisect_opt);
    hinf->add_option("--tol", hinf_tol, "bisection bracket width");

    double k_lo = 0.0, k_hi = 0.0, l_lo = 0.0, l_hi = 0.0, clip = 200.0;
    int steps = 41;
    auto* landscape = app.add_subcommand("landscape", "CSV cost landscape over a scalar gain grid");
    landscape->add_option("file", file, "problem file (JSON)")->required();
    landscape->add_option("--k-range", [&k_lo, &k_hi](const CLI::results_t& vals) {
        k_lo = std::stod(vals.at(0));
        k_hi = std::stod(vals.at(1));
        return true;
    }, "control gain range a b")->required()->expected(2);
    landscape->add_option("--l-range", [&l_lo, &l_hi](const CLI::results_t& vals) {
        l_lo = std::stod(vals.at(0));
        l_hi = std::stod(vals.at(1));
        return true;
    }, "disturbance gain range c d")->required()->expected(2);
    landscape->add_option("--steps", steps, "grid points per axis");
    landscape->add_option("--clip", clip, "clip magnitude for emitted values");

    std::vector<std::string> argv_copy = args;
    std::vector<char*> argv;
    argv.reserve(argv_copy.size() + 1);
    static char prog[] = "lqgame";
    argv.push_back(prog);
    for (std::string& a : argv_copy) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            out << app.help() << "\n";
            return kExitOk;
        }
        err << "lqgame: " << e.what() << "\n";
        return kExitError;
    }

    try {
        if (solve->parsed()) return cmd_solve(file, game_opts, out);
        if (kkt->parsed()) return cmd_kkt(file, out);
        if (lqr->parsed()) return cmd_lqr(file, tol, out);
        if (hinf->parsed()) {
            if (gamma_opt->count() > 0) return cmd_hinf_single(file, gamma, out);
            if (bisect_opt->count() > 0) return cmd_hinf_bisect(file, lo, hi, hinf_tol, out);
            err << "lqgame: hinf needs --gamma or --bisect\n";
            return kExitError;
        }
        if (landscape->parsed()) return cmd_landscape(file, k_lo, k_hi, l_lo, l_hi, steps, clip, out);
    } catch (const Error& e) {
        err << "lqgame: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "lqgame: unexpected failure: " << e.what() << "\n";
        return kExitError;
    }
    err << "lqgame: no subcommand selected\n";
    return kExitError;
}

}  // namespace lqgame::cli

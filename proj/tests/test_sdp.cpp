#include <doctest.h>

#include <cmath>
#include <random>

#include "lqgame/game.hpp"
#include "lqgame/sdp.hpp"
#include "test_support.hpp"

using namespace lqgame;
using test_support::random_matrix;
using test_support::random_spd;
using test_support::scalar_family;
using test_support::scalar_system;

namespace {

// min x s.t. x = 2, x >= 0 (r = 1).
SdpProblem tiny_problem() {
    SdpProblem p;
    p.cone_dim = 1;
    p.cost = SymmetricMatrix{{1.0}};
    p.constraint_mats = {SymmetricMatrix{{1.0}}};
    p.b = Vector{2.0};
    return p;
}

// Random problem with a strictly feasible primal-dual pair built in:
// X0 > 0 fixes b, and C = A*(y0) + S0 with S0 > 0 fixes the cost.
SdpProblem random_feasible_problem(std::mt19937& rng, int r, int m) {
    SdpProblem p;
    p.cone_dim = r;
    for (int i = 0; i < m; ++i) p.constraint_mats.push_back(symmetrize(random_matrix(rng, r, r, 1.0)));
    const SymmetricMatrix x0 = random_spd(rng, r);
    p.b = p.forward_apply(x0);
    Vector y0(static_cast<std::size_t>(m));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : y0) v = dist(rng);
    const SymmetricMatrix s0 = random_spd(rng, r);
    p.cost = p.adjoint_apply(y0) + s0;
    return p;
}

}  // namespace

TEST_CASE("svec round trip and isometry") {
    std::mt19937 rng(211);
    const SymmetricMatrix m = symmetrize(random_matrix(rng, 4, 4, 2.0));
    const Vector v = svec(m);
    CHECK(static_cast<int>(v.size()) == svec_dim(4));
    const SymmetricMatrix back = smat(v);
    CHECK((back - m).frobenius_norm() <= 1e-14 * (1.0 + m.frobenius_norm()));

    const SymmetricMatrix m2 = symmetrize(random_matrix(rng, 4, 4, 2.0));
    CHECK(dot(svec(m), svec(m2)) == doctest::Approx(inner(m, m2)).epsilon(1e-12));
}

TEST_CASE("dualize on the 1x1 cone") {
    const SdpProblem p = tiny_problem();
    const SdpProblem d = dualize(p);
    CHECK(d.form == SdpProblem::Form::lmi);
    CHECK(d.sense == SdpProblem::Sense::maximize);
    // max 2y subject to 1 - y >= 0: slack at y = 1 is zero.
    CHECK(d.dual_slack(Vector{1.0})(0, 0) == doctest::Approx(0.0));
    CHECK(d.dual_slack(Vector{0.5})(0, 0) == doctest::Approx(0.5));

    const SdpProblem dd = dualize(d);
    CHECK(dd.form == p.form);
    CHECK(dd.sense == p.sense);
    CHECK((dd.cost - p.cost).frobenius_norm() == 0.0);
}

TEST_CASE("dualize with zero cost gives slack -A*(y)") {
    SdpProblem p = tiny_problem();
    p.cost = SymmetricMatrix::zeros(1);
    const SdpProblem d = dualize(p);
    CHECK(d.dual_slack(Vector{-3.0})(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("solve_ipm trivial problems") {
    const SdpSolution sol = solve_ipm(tiny_problem(), 1e-10);
    CHECK(sol.status == SdpSolution::Status::optimal);
    CHECK(sol.x(0, 0) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(sol.y[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sol.gap <= 1e-9 * (1.0 + std::abs(sol.primal_obj)));

    SdpProblem neg = tiny_problem();
    neg.cost = SymmetricMatrix{{-1.0}};
    neg.b = Vector{3.0};
    neg.sense = SdpProblem::Sense::maximize;
    const SdpSolution sol2 = solve_ipm(neg, 1e-10);
    CHECK(sol2.status == SdpSolution::Status::optimal);
    CHECK(sol2.primal_obj == doctest::Approx(-3.0).epsilon(1e-8));
}

TEST_CASE("solve_ipm on random strictly feasible problems") {
    std::mt19937 rng(223);
    int solved = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int r = 2 + static_cast<int>(rng() % 3);
        const int m = 1 + static_cast<int>(rng() % (svec_dim(r) - 1));
        const SdpProblem p = random_feasible_problem(rng, r, m);
        const SdpSolution sol = solve_ipm(p, 1e-8);
        REQUIRE(sol.status == SdpSolution::Status::optimal);
        ++solved;

        CHECK(sol.gap <= 1e-6 * (1.0 + std::abs(sol.primal_obj)));
        // Feasibility of the returned pair.
        const Vector ax = p.forward_apply(sol.x);
        double res = 0.0;
        for (std::size_t i = 0; i < ax.size(); ++i) res = std::max(res, std::abs(ax[i] - p.b[i]));
        CHECK(res <= 1e-6 * (1.0 + norm2(p.b)));
        CHECK(min_eigenvalue(sol.x) >= -1e-8);
        CHECK(min_eigenvalue(sol.s) >= -1e-8);

        // Weak duality for the minimize sense.
        CHECK(sol.dual_obj <= sol.primal_obj + 1e-6 * (1.0 + std::abs(sol.primal_obj)));
    }
    CHECK(solved == 20);
}

TEST_CASE("solve_ipm agrees with its dualize image") {
    std::mt19937 rng(227);
    const SdpProblem p = random_feasible_problem(rng, 3, 4);
    const SdpSolution primal = solve_ipm(p, 1e-9);
    const SdpSolution dual = solve_ipm(dualize(p), 1e-9);
    CHECK(primal.primal_obj == doctest::Approx(dual.primal_obj).epsilon(1e-8));
    CHECK(primal.dual_obj == doctest::Approx(dual.dual_obj).epsilon(1e-8));
}

TEST_CASE("returned primal is already symmetric") {
    std::mt19937 rng(229);
    const SdpProblem p = random_feasible_problem(rng, 3, 3);
    const SdpSolution sol = solve_ipm(p, 1e-8);
    const Matrix resym = (sol.x.mat() + sol.x.mat().transpose()) * 0.5;
    CHECK((resym - sol.x.mat()).max_abs() <= 1e-14);
}

TEST_CASE("solve_ipm on the scalar-family upper SDP hits the game value") {
    const SystemData sys = scalar_system(10.0);
    const test_support::ScalarFamily f = scalar_family(10.0);
    const SdpProblem upper = build_upper_sdp(sys, Matrix{{f.k}});
    const SdpSolution sol = solve_ipm(upper, 1e-8);
    REQUIRE(sol.status == SdpSolution::Status::optimal);
    CHECK(sol.primal_obj == doctest::Approx(f.p).epsilon(1e-5));
}

TEST_CASE("check_kkt verdicts on the 1x1 problem") {
    const SdpProblem p = tiny_problem();
    const KktReport good = check_kkt(p, SymmetricMatrix{{2.0}}, Vector{1.0}, 1e-9);
    CHECK(good.verdict);
    CHECK(good.primal_residual <= 1e-12);
    CHECK(good.slackness == doctest::Approx(0.0));

    const KktReport bad = check_kkt(p, SymmetricMatrix{{2.0}}, Vector{1.5}, 1e-9);
    CHECK_FALSE(bad.verdict);
    CHECK(bad.dual_min_eig == doctest::Approx(-0.5));
}

TEST_CASE("check_kkt implies a small duality gap") {
    std::mt19937 rng(233);
    for (int trial = 0; trial < 8; ++trial) {
        const SdpProblem p = random_feasible_problem(rng, 3, 3);
        const SdpSolution sol = solve_ipm(p, 1e-9);
        REQUIRE(sol.status == SdpSolution::Status::optimal);
        const double tol = 1e-6;
        const KktReport rep = check_kkt(p, sol.x, sol.y, tol);
        if (rep.verdict) {
            const double gap = std::abs(inner(p.cost, sol.x) - dot(p.b, sol.y));
            CHECK(gap <= 10.0 * tol * (1.0 + std::abs(inner(p.cost, sol.x))));
        }
    }
}

TEST_CASE("solve_ipm survives the boundary optimum at x0 = 0") {
    SystemData sys = scalar_system(10.0);
    sys.x0 = Vector{0.0};
    const test_support::ScalarFamily f = scalar_family(10.0);
    const SdpProblem upper = build_upper_sdp(sys, Matrix{{f.k}});
    const SdpSolution sol = solve_ipm(upper, 1e-8);
    CHECK(sol.status == SdpSolution::Status::optimal);
    CHECK(std::abs(sol.primal_obj) <= 1e-6);
}

TEST_CASE("solve_ipm flags runaway unbounded problems") {
    // max x s.t. trivial feasibility: unbounded above -> divergence heuristic.
    SdpProblem p;
    p.cone_dim = 2;
    p.cost = SymmetricMatrix{{1.0, 0.0}, {0.0, 0.0}};
    p.constraint_mats = {SymmetricMatrix{{0.0, 0.0}, {0.0, 1.0}}};
    p.b = Vector{1.0};
    p.sense = SdpProblem::Sense::maximize;
    const SdpSolution sol = solve_ipm(p, 1e-8);
    CHECK(sol.status != SdpSolution::Status::optimal);
}

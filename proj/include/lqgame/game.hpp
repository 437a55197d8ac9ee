#pragma once

#include <optional>
#include <vector>

#include "lqgame/riccati.hpp"
#include "lqgame/sdp.hpp"

namespace lqgame {

/// Trajectory Gramian over the state and one partner channel (control or
/// disturbance), with the block layout Z = [[Z11, Z12], [Z12^T, Z22]].
struct GramianMatrix {
    SymmetricMatrix z;
    int state_dim = 0;
    int partner_dim = 0;

    SymmetricMatrix z11() const { return SymmetricMatrix(z.mat().block(0, 0, state_dim, state_dim)); }
    Matrix z12() const { return z.mat().block(0, state_dim, state_dim, partner_dim); }
    SymmetricMatrix z22() const { return SymmetricMatrix(z.mat().block(state_dim, state_dim, partner_dim, partner_dim)); }
};

struct CostValue {
    enum class Kind { finite, divergent_positive, divergent_negative };
    Kind kind = Kind::finite;
    double amount = 0.0;  // meaningful only when finite

    bool finite() const { return kind == Kind::finite; }
};

struct ValueReport {
    double value = 0.0;  // x0^T P* x0
    double upper_sdp_value = 0.0;
    std::optional<double> lower_sdp_value;
    std::optional<double> upper_dual_value;
    std::optional<double> lower_dual_value;
    PolicyPair policies;
    AreSolution are;
    bool regularity = false;
    KktReport kkt_upper;
    std::optional<KktReport> kkt_lower;
    bool saddle_certified = false;
    int ipm_iterations = 0;  // summed over all SDP solves
};

struct GameSolveOptions {
    double ipm_tol = 1e-8;    // SDP solves
    double cert_tol = 1e-7;   // certificate verdicts
    double value_tol = 1e-5;  // cross-value comparisons
};

struct LandscapePoint {
    double k = 0.0;
    double l = 0.0;
    double j = 0.0;
};

/// LQR value SDP: minimize <diag(Q, R), Z> over Z >= 0 subject to the
/// n(n+1)/2 scalar equalities of x0 x0^T + A Z11 + B Z12^T + (.)^T = 0.
SdpProblem build_lqr_sdp(const Matrix& a, const Matrix& b, const SymmetricMatrix& q, const SymmetricMatrix& r,
                         const Vector& x0);

/// Upper-value SDP over the disturbance Gramian with the control fixed at K:
/// maximize <diag(Q + K^T R K, -gamma^2 I), Z> under the closed loop A + B K.
SdpProblem build_upper_sdp(const SystemData& sys, const Matrix& k);

/// Lower-value SDP over the control Gramian with the disturbance fixed at L:
/// minimize <diag(Q - gamma^2 L^T L, R), Z> under the drift A + Bw L.
/// Throws RegularityViolated when the state weight is not positive definite.
SdpProblem build_lower_sdp(const SystemData& sys, const Matrix& l);

/// Duals of the two game SDPs in the variable P with objective x0^T P x0,
/// built blockwise and matching dualize() of the primal builders entrywise.
/// The decision vector maps to P as y = svec(P).
SdpProblem build_dual_upper(const SystemData& sys, const Matrix& k);
SdpProblem build_dual_lower(const SystemData& sys, const Matrix& l);

/// Checks the two completed-square inequalities that make the Riccati solution
/// dual-feasible on both sides; at the exact solution both collapse to
/// comparing the Riccati residual against zero.
std::pair<bool, bool> verify_completed_squares(const SystemData& sys, const AreSolution& sol);

/// Rank-structured feasible Gramian [I; gain] Z11 [I; gain]^T with
/// Z11 = state_gramian(a_cl, x0).
GramianMatrix candidate_gramian(const SystemData& sys, const Matrix& a_cl, const Matrix& gain);

/// Infinite-horizon cost of the linear policy pair (K, L). Stable closed loops
/// are evaluated exactly through a Lyapunov solve; unstable ones are
/// classified by the sign of the cost increments over growing simulation
/// horizons (heuristic for n > 1, exact in the scalar case).
CostValue evaluate_linear_cost(const SystemData& sys, const Matrix& k, const Matrix& l);

/// Full pipeline: game Riccati solve, the four SDPs, candidate Gramians, and
/// KKT certification of both primal-dual pairs. When regularity fails the
/// lower side is left empty and saddle_certified is false.
ValueReport solve_game(const SystemData& sys, const GameSolveOptions& opts = {});

/// Saddle sampling over a (K, L) grid: J(K*, L) may not exceed the value and
/// J(K, L*) may not fall below it, with divergence counting toward the
/// matching side.
bool verify_saddle_sampling(const SystemData& sys, const ValueReport& report,
                            const std::vector<std::pair<Matrix, Matrix>>& grid, double tol = 1e-6);

/// Cost landscape over a scalar gain grid, K outer and L inner, finite values
/// clipped to [-clip, clip] and divergence mapped to the signed clip.
std::vector<LandscapePoint> landscape_grid(const SystemData& sys, double k_lo, double k_hi, double l_lo, double l_hi,
                                           int steps, double clip);

}  // namespace lqgame

#pragma once

#include <vector>

#include "lqgame/matrix.hpp"

namespace lqgame {

// Symmetric vectorization. svec stacks the lower triangle column by column
// with off-diagonal entries scaled by sqrt(2):
//   svec(M) = (M_11, /2 M_21, ..., /2 M_r1, M_22, /2 M_32, ...),  /2 = sqrt(2).
// The scaling makes svec an isometry, <svec(A), svec(B)> = <A, B>, so the
// adjoint of a constraint matrix stacked row-wise is its plain transpose.
int svec_dim(int r);
Vector svec(const SymmetricMatrix& m);
SymmetricMatrix smat(const Vector& v);

/// Conic problem data. Two readings share the same fields:
///   standard: optimize <C, X>  s.t.  <A_i, X> = b_i,  X in PSD cone;
///   lmi:      optimize b^T y   s.t.  slack(y) in PSD cone, where
///             slack(y) = C - sum_i y_i A_i   (sense = maximize)
///             slack(y) = sum_i y_i A_i - C   (sense = minimize).
/// dualize() flips the reading; the slack-sign convention is exactly what the
/// Lagrangian of the opposite reading produces, so dualize is an involution.
struct SdpProblem {
    enum class Sense { minimize, maximize };
    enum class Form { standard, lmi };

    int cone_dim = 0;  // r
    SymmetricMatrix cost;
    std::vector<SymmetricMatrix> constraint_mats;
    Vector b;
    Sense sense = Sense::minimize;
    Form form = Form::standard;

    int num_constraints() const { return static_cast<int>(constraint_mats.size()); }
    void validate() const;

    /// sum_i y_i A_i
    SymmetricMatrix adjoint_apply(const Vector& y) const;
    /// (<A_1, X>, ..., <A_m, X>)
    Vector forward_apply(const SymmetricMatrix& x) const;
    /// Dual slack at y under this problem's form/sense convention.
    SymmetricMatrix dual_slack(const Vector& y) const;
};

struct SdpSolution {
    enum class Status { optimal, infeasible_detected, max_iter };

    SymmetricMatrix x;   // conic variable (standard form) or conic multiplier (lmi form)
    Vector y;            // multiplier vector (standard form) or decision vector (lmi form)
    SymmetricMatrix s;   // dual slack
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double gap = 0.0;
    Status status = Status::max_iter;
    int iterations = 0;
};

struct KktReport {
    double primal_residual = 0.0;  // max of ||A(X) - b|| and PSD violation of X
    double dual_min_eig = 0.0;     // smallest eigenvalue of the dual slack
    double slackness = 0.0;        // <X, slack>
    bool verdict = false;
};

/// Lagrange dual of the given problem: form and sense flip, data is shared.
/// dualize(dualize(p)) reproduces p.
SdpProblem dualize(const SdpProblem& p);

/// Dense primal-dual path-following with Nesterov-Todd scaling and a Mehrotra
/// predictor-corrector step, started from an infeasible interior point.
/// Handles both problem forms; the cap is 200 iterations (status max_iter).
SdpSolution solve_ipm(const SdpProblem& p, double tol);

/// Evaluates primal feasibility, dual slack definiteness, and complementary
/// slackness of the pair (X, y); verdict true certifies joint optimality of
/// both points up to tol.
KktReport check_kkt(const SdpProblem& p, const SymmetricMatrix& x, const Vector& y, double tol);

}  // namespace lqgame

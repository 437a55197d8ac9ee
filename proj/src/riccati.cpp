#include "lqgame/riccati.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace lqgame {

namespace {

constexpr int kNewtonCap = 100;

double residual_tolerance(const SymmetricMatrix& q) { return 1e-10 * (1.0 + q.frobenius_norm()); }

// B R^-1 B^T
Matrix control_quadratic(const Matrix& b, const SymmetricMatrix& r) {
    if (b.cols() == 0) return Matrix::zeros(b.rows(), b.rows());
    return b * lu_solve(r.mat(), b.transpose());
}

Matrix disturbance_quadratic(const Matrix& bw) {
    if (bw.cols() == 0) return Matrix::zeros(bw.rows(), bw.rows());
    return bw * bw.transpose();
}

// Residual of the theta-homotopy equation
//   A^T P + P A + Q - P Sb P + theta P Sw P,  Sb = B R^-1 B^T, Sw = Bw Bw^T.
SymmetricMatrix theta_residual(const Matrix& a, const Matrix& sb, const Matrix& sw, const SymmetricMatrix& q,
                               double theta, const SymmetricMatrix& p) {
    const Matrix pm = p.mat();
    Matrix res = a.transpose() * pm + pm * a + q.mat() - pm * sb * pm;
    if (theta != 0.0) res += (pm * sw * pm) * theta;
    return symmetrize(res);
}

struct NewtonOutcome {
    bool ok = false;
    bool lost_stability = false;
    SymmetricMatrix p;
    int iterations = 0;
};

// Newton iteration on the theta equation from a stabilizing start. Each step
// solves the closed-loop Lyapunov equation
//   Ac^T P+ + P+ Ac + Q + P Sb P - theta P Sw P = 0,  Ac = A - Sb P + theta Sw P.
NewtonOutcome newton_theta(const Matrix& a, const Matrix& sb, const Matrix& sw, const SymmetricMatrix& q,
                           double theta, const SymmetricMatrix& p_start) {
    NewtonOutcome out;
    SymmetricMatrix p = p_start;
    const double tol = residual_tolerance(q);
    double cur_res = theta_residual(a, sb, sw, q, theta, p).frobenius_norm();
    double best = cur_res;
    int stagnant = 0;

    for (int it = 0; it < kNewtonCap; ++it) {
        if (cur_res <= tol) {
            out.ok = true;
            out.p = p;
            out.iterations = it;
            return out;
        }
        const Matrix pm = p.mat();
        Matrix a_cl = a - sb * pm;
        if (theta != 0.0) a_cl += (sw * pm) * theta;
        if (!is_hurwitz(a_cl)) {
            out.lost_stability = true;
            return out;
        }
        Matrix forcing = q.mat() + pm * sb * pm;
        if (theta != 0.0) forcing -= (pm * sw * pm) * theta;
        SymmetricMatrix p_next;
        try {
            p_next = solve_lyapunov(a_cl, symmetrize(forcing), LyapunovSide::left);
        } catch (const SingularOperator&) {
            out.lost_stability = true;
            return out;
        }
        p = p_next;
        cur_res = theta_residual(a, sb, sw, q, theta, p).frobenius_norm();
        if (!std::isfinite(cur_res)) return out;
        if (cur_res < 0.5 * best) {
            stagnant = 0;
        } else if (++stagnant > 15) {
            return out;
        }
        best = std::min(best, cur_res);
    }
    if (cur_res <= tol) {
        out.ok = true;
        out.p = p;
        out.iterations = kNewtonCap;
    }
    return out;
}

AreSolution finalize_solution(const Matrix& a, const Matrix& b, const Matrix& bw, const SymmetricMatrix& q,
                              const SymmetricMatrix& r, double gamma, const SymmetricMatrix& p) {
    AreSolution sol;
    sol.p = p;

    const Matrix pm = p.mat();
    Matrix k = Matrix::zeros(b.cols(), a.rows());
    if (b.cols() > 0) k = -lu_solve(r.mat(), b.transpose() * pm);
    Matrix l = Matrix::zeros(bw.cols(), a.rows());
    if (bw.cols() > 0) l = bw.transpose() * pm * (1.0 / (gamma * gamma));

    Matrix a_cl = a;
    if (b.cols() > 0) a_cl += b * k;
    if (bw.cols() > 0) a_cl += bw * l;
    sol.closed_loop = a_cl;
    sol.is_stabilizing = is_hurwitz(a_cl);

    const Matrix sb = control_quadratic(b, r);
    const Matrix sw = disturbance_quadratic(bw);
    Matrix res = a.transpose() * pm + pm * a + q.mat() - pm * sb * pm + (pm * sw * pm) * (1.0 / (gamma * gamma));
    sol.residual_norm = symmetrize(res).frobenius_norm();

    sol.is_psd = min_eigenvalue(p) >= -1e-8 * (1.0 + p.frobenius_norm());

    const SymmetricMatrix reg = symmetrize(q.mat() - (pm * sw * pm) * (1.0 / (gamma * gamma)));
    sol.regularity_margin = min_eigenvalue(reg);
    sol.regularity = sol.regularity_margin > 0.0;
    return sol;
}

}  // namespace

void SystemData::validate() const {
    const int n = state_dim();
    if (!a.is_square() || n == 0) throw DimensionMismatch("A must be square and nonempty");
    if (b.rows() != n) throw DimensionMismatch("B row count must match A");
    if (bw.rows() != n) throw DimensionMismatch("Bw row count must match A");
    if (q.dim() != n) throw DimensionMismatch("Q dimension must match A");
    if (r.dim() != control_dim()) throw DimensionMismatch("R dimension must match B columns");
    if (static_cast<int>(x0.size()) != n) throw DimensionMismatch("x0 length must match A");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DimensionMismatch("gamma must be positive");
    if (min_eigenvalue(q) <= 0.0) throw DimensionMismatch("Q must be positive definite");
    if (control_dim() > 0 && min_eigenvalue(r) <= 0.0) throw DimensionMismatch("R must be positive definite");
}

SymmetricMatrix riccati_residual(const SystemData& sys, const SymmetricMatrix& p) {
    if (p.dim() != sys.state_dim()) throw DimensionMismatch("riccati_residual: P dimension");
    const Matrix sb = control_quadratic(sys.b, sys.r);
    const Matrix sw = disturbance_quadratic(sys.bw);
    const Matrix pm = p.mat();
    const double inv_g2 = 1.0 / (sys.gamma * sys.gamma);
    Matrix res = sys.a.transpose() * pm + pm * sys.a + sys.q.mat() - pm * sb * pm + (pm * sw * pm) * inv_g2;
    return symmetrize(res);
}

Matrix initial_stabilizing_gain(const Matrix& a, const Matrix& b) {
    if (!a.is_square() || b.rows() != a.rows()) throw DimensionMismatch("initial_stabilizing_gain shapes");
    const int n = a.rows();
    const int m = b.cols();

    const double beta = 1.0 + a.frobenius_norm();
    Matrix shifted = a;
    for (int i = 0; i < n; ++i) shifted(i, i) += beta;

    const Matrix bbt = (m > 0) ? Matrix(b * b.transpose()) : Matrix::zeros(n, n);
    const SymmetricMatrix w = solve_lyapunov(shifted, symmetrize(bbt * -2.0), LyapunovSide::right);

    Matrix k0 = Matrix::zeros(m, n);
    if (m > 0) k0 = -(b.transpose() * sym_pinv(w).mat());

    const Matrix a_cl = (m > 0) ? Matrix(a + b * k0) : a;
    if (!is_hurwitz(a_cl)) throw StabilizationFailed("Bass gain does not stabilize (A, B)");
    return k0;
}

AreSolution solve_lqr_are(const Matrix& a, const Matrix& b, const SymmetricMatrix& q, const SymmetricMatrix& r) {
    const int n = a.rows();
    if (q.dim() != n || b.rows() != n || r.dim() != b.cols()) throw DimensionMismatch("solve_lqr_are shapes");

    // Kleinman: seed with a stabilizing gain, then alternate Lyapunov solves
    // with gain updates K = -R^-1 B^T P.
    Matrix k = initial_stabilizing_gain(a, b);
    const double tol = residual_tolerance(q);
    const Matrix sb = control_quadratic(b, r);

    SymmetricMatrix p = SymmetricMatrix::zeros(n);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kNewtonCap; ++it) {
        const Matrix a_cl = (b.cols() > 0) ? Matrix(a + b * k) : a;
        if (!is_hurwitz(a_cl)) throw NoConvergence("LQR Newton iterate lost stability");
        const Matrix wk = (b.cols() > 0) ? Matrix(q.mat() + k.transpose() * r.mat() * k) : q.mat();
        p = solve_lyapunov(a_cl, symmetrize(wk), LyapunovSide::left);
        res = theta_residual(a, sb, Matrix::zeros(n, n), q, 0.0, p).frobenius_norm();
        if (b.cols() > 0) k = -lu_solve(r.mat(), b.transpose() * p.mat());
        if (res <= tol) {
            const Matrix bw_empty = Matrix::zeros(n, 0);
            return finalize_solution(a, b, bw_empty, q, r, 1.0, p);
        }
    }
    throw NoConvergence("LQR Newton iteration cap reached, residual " + std::to_string(res));
}

AreSolution solve_game_are(const SystemData& sys) {
    sys.validate();
    const Matrix sb = control_quadratic(sys.b, sys.r);
    const Matrix sw = disturbance_quadratic(sys.bw);

    SymmetricMatrix p = solve_lqr_are(sys.a, sys.b, sys.q, sys.r).p;

    const double theta_end = 1.0 / (sys.gamma * sys.gamma);
    const double h0 = theta_end / 20.0;
    const double h_min = h0 / 64.0;  // up to 2^6 adaptive refinement
    double theta = 0.0;
    double h = h0;
    bool lost_stability = false;

    while (theta < theta_end * (1.0 - 1e-15)) {
        const double theta_next = std::min(theta + h, theta_end);
        const NewtonOutcome out = newton_theta(sys.a, sb, sw, sys.q, theta_next, p);
        if (out.ok) {
            p = out.p;
            theta = theta_next;
            continue;
        }
        lost_stability = lost_stability || out.lost_stability;
        h *= 0.5;
        if (h < h_min * (1.0 - 1e-12)) {
            if (lost_stability)
                throw CertificateAbsent("continuation lost the stabilizing solution at theta = " +
                                        std::to_string(theta) + " of " + std::to_string(theta_end));
            throw NoConvergence("game Riccati Newton stalled at theta = " + std::to_string(theta));
        }
    }

    return finalize_solution(sys.a, sys.b, sys.bw, sys.q, sys.r, sys.gamma, p);
}

PolicyPair extract_policies(const SystemData& sys, const AreSolution& sol) {
    PolicyPair pair;
    const Matrix pm = sol.p.mat();
    pair.k = (sys.control_dim() > 0) ? Matrix(-lu_solve(sys.r.mat(), sys.b.transpose() * pm))
                                     : Matrix::zeros(0, sys.state_dim());
    pair.l = (sys.disturbance_dim() > 0) ? Matrix(sys.bw.transpose() * pm * (1.0 / (sys.gamma * sys.gamma)))
                                         : Matrix::zeros(0, sys.state_dim());
    return pair;
}

}  // namespace lqgame

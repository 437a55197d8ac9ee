#include "lqgame/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef LQGAME_IPM_TRACE
#include <cstdio>
#endif

#include "lqgame/numerics.hpp"

namespace lqgame {

namespace {
const double kSqrt2 = std::sqrt(2.0);
constexpr int kMaxIterations = 200;
constexpr double kStepFraction = 0.99;  // fraction-to-boundary
}  // namespace

int svec_dim(int r) { return r * (r + 1) / 2; }

Vector svec(const SymmetricMatrix& m) {
    const int r = m.dim();
    Vector v(static_cast<std::size_t>(svec_dim(r)));
    std::size_t k = 0;
    for (int j = 0; j < r; ++j) {
        v[k++] = m(j, j);
        for (int i = j + 1; i < r; ++i) v[k++] = kSqrt2 * m(i, j);
    }
    return v;
}

SymmetricMatrix smat(const Vector& v) {
    const int r = static_cast<int>(std::round((std::sqrt(8.0 * static_cast<double>(v.size()) + 1.0) - 1.0) / 2.0));
    if (svec_dim(r) != static_cast<int>(v.size())) throw DimensionMismatch("smat: length is not triangular");
    Matrix m(r, r);
    std::size_t k = 0;
    for (int j = 0; j < r; ++j) {
        m(j, j) = v[k++];
        for (int i = j + 1; i < r; ++i) {
            const double val = v[k++] / kSqrt2;
            m(i, j) = val;
            m(j, i) = val;
        }
    }
    return SymmetricMatrix(m);
}

void SdpProblem::validate() const {
    if (cone_dim <= 0) throw DimensionMismatch("SDP cone dimension must be positive");
    if (cone_dim > 64) throw DimensionMismatch("dense solver supports cone dimension up to 64");
    if (cost.dim() != cone_dim) throw DimensionMismatch("SDP cost dimension");
    if (b.size() != constraint_mats.size()) throw DimensionMismatch("SDP rhs length");
    for (const SymmetricMatrix& ai : constraint_mats)
        if (ai.dim() != cone_dim) throw DimensionMismatch("SDP constraint matrix dimension");
    for (double v : b)
        if (!std::isfinite(v)) throw NonFiniteValue("SDP rhs");
}

SymmetricMatrix SdpProblem::adjoint_apply(const Vector& y) const {
    if (y.size() != constraint_mats.size()) throw DimensionMismatch("adjoint_apply: y length");
    Matrix acc = Matrix::zeros(cone_dim, cone_dim);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0.0) continue;
        acc += constraint_mats[i].mat() * y[i];
    }
    return SymmetricMatrix(acc);
}

Vector SdpProblem::forward_apply(const SymmetricMatrix& x) const {
    Vector out(constraint_mats.size());
    for (std::size_t i = 0; i < constraint_mats.size(); ++i) out[i] = inner(constraint_mats[i], x);
    return out;
}

SymmetricMatrix SdpProblem::dual_slack(const Vector& y) const {
    const SymmetricMatrix aty = adjoint_apply(y);
    const bool slack_is_c_minus =
        (form == Form::standard && sense == Sense::minimize) || (form == Form::lmi && sense == Sense::maximize);
    return slack_is_c_minus ? cost - aty : aty - cost;
}

SdpProblem dualize(const SdpProblem& p) {
    SdpProblem d = p;
    d.sense = (p.sense == SdpProblem::Sense::minimize) ? SdpProblem::Sense::maximize : SdpProblem::Sense::minimize;
    d.form = (p.form == SdpProblem::Form::standard) ? SdpProblem::Form::lmi : SdpProblem::Form::standard;
    return d;
}

namespace {

// ----- interior-point kernel on the standard minimize form -----------------
//   min <C, X>   s.t.  <A_i, X> = b_i,  X >= 0
//   max b^T y    s.t.  A*(y) + S = C,   S >= 0

struct KernelResult {
    SymmetricMatrix x;
    Vector y;
    SymmetricMatrix s;
    SdpSolution::Status status = SdpSolution::Status::max_iter;
    int iterations = 0;
};

struct EigCache {
    EigenDecomposition dec;
    SymmetricMatrix power(double expo) const {
        const int n = dec.eigenvectors.rows();
        Matrix d(n, n);
        for (int i = 0; i < n; ++i) {
            const double lam = dec.eigenvalues[static_cast<std::size_t>(i)];
            if (lam <= 0.0) throw NumericalBreakdown("non-PD matrix in NT scaling");
            d(i, i) = std::pow(lam, expo);
        }
        return SymmetricMatrix(dec.eigenvectors * d * dec.eigenvectors.transpose());
    }
};

// Largest alpha with M + alpha * D >= 0, via lambda_min(L^-1 D L^-T).
double max_psd_step(const SymmetricMatrix& m, const SymmetricMatrix& d) {
    Matrix lower;
    if (!cholesky(m, lower)) return 0.0;
    const int n = m.dim();
    // Y = L^-1 D
    Matrix ym = d.mat();
    for (int col = 0; col < n; ++col) {
        for (int i = 0; i < n; ++i) {
            double s = ym(i, col);
            for (int k = 0; k < i; ++k) s -= lower(i, k) * ym(k, col);
            ym(i, col) = s / lower(i, i);
        }
    }
    // N^T = L^-1 Y^T
    Matrix nt = ym.transpose();
    for (int col = 0; col < n; ++col) {
        for (int i = 0; i < n; ++i) {
            double s = nt(i, col);
            for (int k = 0; k < i; ++k) s -= lower(i, k) * nt(k, col);
            nt(i, col) = s / lower(i, i);
        }
    }
    const double lmin = min_eigenvalue(SymmetricMatrix(nt));
    if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

KernelResult ipm_kernel(const SymmetricMatrix& c, const std::vector<SymmetricMatrix>& a_mats, const Vector& b,
                        double tol) {
    const int r = c.dim();
    const int m = static_cast<int>(a_mats.size());
    const int sd = svec_dim(r);

    // Constraint rows as svec vectors.
    Matrix a_op(m, sd);
    for (int i = 0; i < m; ++i) {
        const Vector row = svec(a_mats[static_cast<std::size_t>(i)]);
        for (int j = 0; j < sd; ++j) a_op(i, j) = row[static_cast<std::size_t>(j)];
    }

    const double b_norm = norm2(b);
    const double c_norm = c.frobenius_norm();
    const double init_scale = std::max({1.0, b_norm, c_norm});

    SymmetricMatrix x = SymmetricMatrix::identity(r) * init_scale;
    SymmetricMatrix s = SymmetricMatrix::identity(r) * init_scale;
    Vector y(static_cast<std::size_t>(m), 0.0);

    KernelResult out;
    int tiny_steps = 0;

    for (int it = 0; it < kMaxIterations; ++it) {
        const Vector ax = a_op.apply(svec(x));
        Vector rp(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) rp[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] - ax[static_cast<std::size_t>(i)];

        const SymmetricMatrix aty = smat(a_op.apply_transpose(y));
        const SymmetricMatrix rd = c - aty - s;

        const double pobj = inner(c, x);
        const double dobj = dot(b, y);
        const double mu = inner(x, s) / r;

        const double perr = norm2(rp) / (1.0 + b_norm);
        const double derr = rd.frobenius_norm() / (1.0 + c_norm);
        const double gap_rel = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
        const double mu_rel = mu * r / (1.0 + std::abs(pobj));

#ifdef LQGAME_IPM_TRACE
        std::fprintf(stderr, "it=%3d mu=%10.3e perr=%10.3e derr=%10.3e gap=%10.3e pobj=%12.5e dobj=%12.5e\n", it, mu,
                     perr, derr, gap_rel, pobj, dobj);
#endif

        if (perr <= tol && derr <= tol && gap_rel <= tol && mu_rel <= 10.0 * tol) {
            out.status = SdpSolution::Status::optimal;
            out.x = x;
            out.y = y;
            out.s = s;
            out.iterations = it;
            return out;
        }

        // Divergence heuristic: runaway iterates with no feasibility progress
        // signal an infeasible or unbounded pair.
        if (x.frobenius_norm() > 1e13 * init_scale || std::abs(dobj) > 1e13 * (1.0 + b_norm + c_norm)) {
            out.status = SdpSolution::Status::infeasible_detected;
            out.x = x;
            out.y = y;
            out.s = s;
            out.iterations = it;
            return out;
        }

        // Nesterov-Todd scaling point: W = S^-1/2 (S^1/2 X S^1/2)^1/2 S^-1/2.
        EigCache s_eig{sym_eig(s)};
        const SymmetricMatrix s_half = s_eig.power(0.5);
        const SymmetricMatrix s_half_inv = s_eig.power(-0.5);
        const SymmetricMatrix s_inv = s_eig.power(-1.0);
        EigCache t_eig{sym_eig(symmetrize(s_half.mat() * x.mat() * s_half.mat()))};
        const SymmetricMatrix t_half = t_eig.power(0.5);
        const SymmetricMatrix w = symmetrize(s_half_inv.mat() * t_half.mat() * s_half_inv.mat());

        // Factor W = R R with the symmetric root; the scaled variables
        // X^ = R^-1 X R^-1 and S^ = R S R coincide at the NT point (the V
        // matrix), which keeps the Mehrotra correction well conditioned.
        EigCache w_eig{sym_eig(w)};
        const SymmetricMatrix w_root = w_eig.power(0.5);
        const SymmetricMatrix w_root_inv = w_eig.power(-0.5);
        const SymmetricMatrix v = symmetrize(w_root.mat() * s.mat() * w_root.mat());
        const EigenDecomposition v_eig = sym_eig(v);

        // Schur complement M_ij = <A_i, W A_j W>.
        Matrix waw_cols(sd, m);
        for (int j = 0; j < m; ++j) {
            const Matrix t = w.mat() * a_mats[static_cast<std::size_t>(j)].mat() * w.mat();
            const Vector col = svec(symmetrize(t));
            for (int kk = 0; kk < sd; ++kk) waw_cols(kk, j) = col[static_cast<std::size_t>(kk)];
        }
        Matrix schur = a_op * waw_cols;
        // The Schur matrix is symmetric PD when the rows of A are independent;
        // a small diagonal lift guards rank-deficient user input.
        SymmetricMatrix schur_sym = symmetrize(schur);
        Matrix schur_chol;
        if (!cholesky(schur_sym, schur_chol)) {
            const double lift = 1e-13 * (1.0 + schur_sym.max_abs());
            Matrix lifted = schur_sym.mat();
            for (int i = 0; i < m; ++i) lifted(i, i) += lift;
            if (!cholesky(SymmetricMatrix(lifted), schur_chol))
                throw NumericalBreakdown("Schur complement is not positive definite");
        }
        auto schur_solve = [&](const Vector& rhs) {
            Vector z = rhs;
            const int mm = static_cast<int>(rhs.size());
            for (int i = 0; i < mm; ++i) {
                double acc = z[static_cast<std::size_t>(i)];
                for (int k = 0; k < i; ++k) acc -= schur_chol(i, k) * z[static_cast<std::size_t>(k)];
                z[static_cast<std::size_t>(i)] = acc / schur_chol(i, i);
            }
            for (int i = mm - 1; i >= 0; --i) {
                double acc = z[static_cast<std::size_t>(i)];
                for (int k = i + 1; k < mm; ++k) acc -= schur_chol(k, i) * z[static_cast<std::size_t>(k)];
                z[static_cast<std::size_t>(i)] = acc / schur_chol(i, i);
            }
            return z;
        };

        const Matrix w_rd_w = w.mat() * rd.mat() * w.mat();

        // One Newton solve of the scaled system with target matrix T:
        //   A(dX) = rp,  A*(dy) + dS = Rd,  dX + W dS W = T.
        // Eliminating dX and dS gives M dy = b - A(X) - A(T) + A(W Rd W).
        auto newton_direction = [&](const Matrix& target, SymmetricMatrix& dx, Vector& dy, SymmetricMatrix& ds) {
            Vector rhs = a_op.apply(svec(symmetrize(w_rd_w - target)));
            for (int i = 0; i < m; ++i)
                rhs[static_cast<std::size_t>(i)] += b[static_cast<std::size_t>(i)] - ax[static_cast<std::size_t>(i)];
            dy = schur_solve(rhs);
            ds = rd - smat(a_op.apply_transpose(dy));
            dx = symmetrize(target - w.mat() * ds.mat() * w.mat());
        };

        auto step_pair = [&](const SymmetricMatrix& dx, const SymmetricMatrix& ds) {
            return std::pair<double, double>{std::min(1.0, kStepFraction * max_psd_step(x, dx)),
                                             std::min(1.0, kStepFraction * max_psd_step(s, ds))};
        };

        // Predictor: affine scaling direction, target -X.
        SymmetricMatrix dx_aff, ds_aff;
        Vector dy_aff;
        newton_direction(x.mat() * -1.0, dx_aff, dy_aff, ds_aff);
        const auto [ap_aff, ad_aff] = step_pair(dx_aff, ds_aff);

        const SymmetricMatrix x_probe = SymmetricMatrix(x.mat() + dx_aff.mat() * ap_aff);
        const SymmetricMatrix s_probe = SymmetricMatrix(s.mat() + ds_aff.mat() * ad_aff);
        const double mu_aff = inner(x_probe, s_probe) / r;
        double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
        sigma = std::clamp(sigma, 1e-8, 1.0);

        // Mehrotra corrector in the scaled space: the complementarity residual
        // sigma*mu*I - V^2 - H(dX^ dS^) is pushed through the inverse of the
        // Lyapunov operator M -> (V M + M V)/2 in V's eigenbasis, then mapped
        // back, giving the target dX + W dS W = R L_V^-1(...) R.
        auto scaled_target = [&](double sigma_mu, bool with_second_order) {
            Matrix rhs_hat = v.mat() * v.mat() * -1.0;
            for (int i = 0; i < r; ++i) rhs_hat(i, i) += sigma_mu;
            if (with_second_order) {
                const Matrix dxh = w_root_inv.mat() * dx_aff.mat() * w_root_inv.mat();
                const Matrix dsh = w_root.mat() * ds_aff.mat() * w_root.mat();
                const Matrix cross = dxh * dsh;
                rhs_hat -= (cross + cross.transpose()) * 0.5;
            }
            Matrix tilde = v_eig.eigenvectors.transpose() * rhs_hat * v_eig.eigenvectors;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j)
                    tilde(i, j) *= 2.0 / (v_eig.eigenvalues[static_cast<std::size_t>(i)] +
                                          v_eig.eigenvalues[static_cast<std::size_t>(j)]);
            const Matrix g = v_eig.eigenvectors * tilde * v_eig.eigenvectors.transpose();
            return Matrix(w_root.mat() * g * w_root.mat());
        };

        SymmetricMatrix dx, ds;
        Vector dy;
        newton_direction(scaled_target(sigma * mu, true), dx, dy, ds);
        auto [ap, ad] = step_pair(dx, ds);

        // Safeguard: when the second-order term wrecks the step, fall back to
        // the plain centered direction.
        if (std::min(ap, ad) < 0.1 * std::min(ap_aff, ad_aff)) {
            SymmetricMatrix dx_c, ds_c;
            Vector dy_c;
            newton_direction(scaled_target(sigma * mu, false), dx_c, dy_c, ds_c);
            const auto [ap_c, ad_c] = step_pair(dx_c, ds_c);
            if (std::min(ap_c, ad_c) > std::min(ap, ad)) {
                dx = dx_c;
                ds = ds_c;
                dy = dy_c;
                ap = ap_c;
                ad = ad_c;
            }
        }

#ifdef LQGAME_IPM_TRACE
        std::fprintf(stderr, "      sigma=%.3e mu_aff=%.3e ap=%.3e ad=%.3e |dx|=%.2e |ds|=%.2e\n", sigma, mu_aff, ap,
                     ad, dx.frobenius_norm(), ds.frobenius_norm());
#endif
        if (ap < 1e-10 && ad < 1e-10) {
            if (++tiny_steps >= 5) throw NumericalBreakdown("interior-point step collapsed");
        } else {
            tiny_steps = 0;
        }

        x = SymmetricMatrix(x.mat() + dx.mat() * ap);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += ad * dy[i];
        s = SymmetricMatrix(s.mat() + ds.mat() * ad);
    }

    out.status = SdpSolution::Status::max_iter;
    out.x = x;
    out.y = y;
    out.s = s;
    out.iterations = kMaxIterations;
    return out;
}

}  // namespace

SdpSolution solve_ipm(const SdpProblem& p, double tol) {
    p.validate();
    if (!(tol > 0.0)) throw DimensionMismatch("solve_ipm: tol must be positive");

    const bool kernel_uses_c =
        (p.form == SdpProblem::Form::standard && p.sense == SdpProblem::Sense::minimize) ||
        (p.form == SdpProblem::Form::lmi && p.sense == SdpProblem::Sense::maximize);
    const SymmetricMatrix kernel_c = kernel_uses_c ? p.cost : p.cost * -1.0;

    const KernelResult kr = ipm_kernel(kernel_c, p.constraint_mats, p.b, tol);

    SdpSolution sol;
    sol.status = kr.status;
    sol.iterations = kr.iterations;
    sol.x = kr.x;
    sol.s = kr.s;
    sol.y = kr.y;
    if (!kernel_uses_c)
        for (double& v : sol.y) v = -v;

    if (p.form == SdpProblem::Form::standard) {
        sol.primal_obj = inner(p.cost, sol.x);
        sol.dual_obj = dot(p.b, sol.y);
    } else {
        sol.primal_obj = dot(p.b, sol.y);
        sol.dual_obj = inner(p.cost, sol.x);
    }
    sol.gap = std::abs(sol.primal_obj - sol.dual_obj);
    return sol;
}

KktReport check_kkt(const SdpProblem& p, const SymmetricMatrix& x, const Vector& y, double tol) {
    p.validate();
    if (x.dim() != p.cone_dim) throw DimensionMismatch("check_kkt: X dimension");
    if (static_cast<int>(y.size()) != p.num_constraints()) throw DimensionMismatch("check_kkt: y length");

    KktReport rep;
    const Vector ax = p.forward_apply(x);
    Vector resid(ax.size());
    for (std::size_t i = 0; i < ax.size(); ++i) resid[i] = ax[i] - p.b[i];
    const double eq_res = norm2(resid);
    const double x_min = min_eigenvalue(x);
    rep.primal_residual = std::max(eq_res, std::max(0.0, -x_min));

    const SymmetricMatrix slack = p.dual_slack(y);
    rep.dual_min_eig = min_eigenvalue(slack);
    rep.slackness = inner(x, slack);

    const double scale_p = 1.0 + norm2(p.b);
    const double scale_s = 1.0 + std::abs(inner(p.cost, x));
    rep.verdict = rep.primal_residual <= tol * scale_p && rep.dual_min_eig >= -tol * (1.0 + p.cost.frobenius_norm()) &&
                  std::abs(rep.slackness) <= tol * scale_s;
    return rep;
}

}  // namespace lqgame

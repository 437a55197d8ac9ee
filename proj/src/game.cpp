#include "lqgame/game.hpp"

#include <algorithm>
#include <cmath>

namespace lqgame {

namespace {

// Orthonormal symmetric basis element in svec order: index alpha walks the
// lower triangle column by column, off-diagonal elements carry 1/sqrt(2).
Matrix sym_basis_element(int n, int alpha) {
    Matrix e(n, n);
    int k = 0;
    for (int j = 0; j < n; ++j) {
        if (k == alpha) {
            e(j, j) = 1.0;
            return e;
        }
        ++k;
        for (int i = j + 1; i < n; ++i) {
            if (k == alpha) {
                const double v = 1.0 / std::sqrt(2.0);
                e(i, j) = v;
                e(j, i) = v;
                return e;
            }
            ++k;
        }
    }
    throw DimensionMismatch("sym_basis_element index out of range");
}

// Equality block of the Gramian feasibility set for the loop x' = A_cl x + B_in v:
//   x0 x0^T + A_cl Z11 + B_in Z12^T + (A_cl Z11 + B_in Z12^T)^T = 0,
// written as <A_alpha, Z> = b_alpha with A_alpha = -(G^T E_alpha Pi + Pi^T E_alpha G),
// G = [A_cl, B_in], Pi = [I, 0], and b = svec(x0 x0^T). With this sign choice
// the dual vector is exactly y = svec(P) for the P-form dual problems.
void append_gramian_equalities(const Matrix& a_cl, const Matrix& b_in, const Vector& x0, SdpProblem& p) {
    const int n = a_cl.rows();
    const int k = b_in.cols();
    Matrix g(n, n + k);
    g.set_block(0, 0, a_cl);
    g.set_block(0, n, b_in);
    Matrix pi(n, n + k);
    pi.set_block(0, 0, Matrix::identity(n));

    const int m_eq = svec_dim(n);
    p.constraint_mats.reserve(static_cast<std::size_t>(m_eq));
    for (int alpha = 0; alpha < m_eq; ++alpha) {
        const Matrix e = sym_basis_element(n, alpha);
        const Matrix a_alpha = -(g.transpose() * e * pi + pi.transpose() * e * g);
        p.constraint_mats.emplace_back(a_alpha);
    }
    p.b = svec(SymmetricMatrix(outer(x0, x0)));
}

SymmetricMatrix block_diag(const SymmetricMatrix& top, const SymmetricMatrix& bottom) {
    const int n = top.dim();
    const int k = bottom.dim();
    Matrix c(n + k, n + k);
    c.set_block(0, 0, top.mat());
    c.set_block(n, n, bottom.mat());
    return SymmetricMatrix(c);
}

SymmetricMatrix lower_weight(const SystemData& sys, const Matrix& l) {
    return symmetrize(sys.q.mat() - l.transpose() * l * (sys.gamma * sys.gamma));
}

// Shared blockwise construction of the P-form duals. The LMI rows follow the
// same basis and signs as append_gramian_equalities, assembled directly from
// the blocks [[A_cl^T E + E A_cl, E B_in], [B_in^T E, 0]].
SdpProblem build_dual_blockwise(const Matrix& a_cl, const Matrix& b_in, const Vector& x0,
                                const SymmetricMatrix& cost, SdpProblem::Sense sense) {
    const int n = a_cl.rows();
    const int k = b_in.cols();
    SdpProblem d;
    d.cone_dim = n + k;
    d.cost = cost;
    d.sense = sense;
    d.form = SdpProblem::Form::lmi;

    const int m_eq = svec_dim(n);
    d.constraint_mats.reserve(static_cast<std::size_t>(m_eq));
    for (int alpha = 0; alpha < m_eq; ++alpha) {
        const Matrix e = sym_basis_element(n, alpha);
        Matrix blockmat(n + k, n + k);
        blockmat.set_block(0, 0, a_cl.transpose() * e + e * a_cl);
        blockmat.set_block(0, n, e * b_in);
        blockmat.set_block(n, 0, b_in.transpose() * e);
        d.constraint_mats.emplace_back(blockmat * -1.0);
    }
    d.b = svec(SymmetricMatrix(outer(x0, x0)));
    return d;
}

}  // namespace

SdpProblem build_lqr_sdp(const Matrix& a, const Matrix& b, const SymmetricMatrix& q, const SymmetricMatrix& r,
                         const Vector& x0) {
    const int n = a.rows();
    if (!a.is_square() || b.rows() != n || q.dim() != n || r.dim() != b.cols() ||
        static_cast<int>(x0.size()) != n)
        throw DimensionMismatch("build_lqr_sdp shapes");
    SdpProblem p;
    p.cone_dim = n + b.cols();
    p.cost = block_diag(q, r);
    p.sense = SdpProblem::Sense::minimize;
    p.form = SdpProblem::Form::standard;
    append_gramian_equalities(a, b, x0, p);
    return p;
}

SdpProblem build_upper_sdp(const SystemData& sys, const Matrix& k) {
    sys.validate();
    if (k.rows() != sys.control_dim() || k.cols() != sys.state_dim())
        throw DimensionMismatch("build_upper_sdp: K shape");
    const Matrix a_k = sys.a + sys.b * k;
    if (!is_hurwitz(a_k)) throw NotHurwitz("build_upper_sdp requires a stabilizing K");

    const SymmetricMatrix q_star = symmetrize(sys.q.mat() + k.transpose() * sys.r.mat() * k);
    const SymmetricMatrix gamma_block =
        SymmetricMatrix(Matrix::identity(sys.disturbance_dim()) * (-sys.gamma * sys.gamma));

    SdpProblem p;
    p.cone_dim = sys.state_dim() + sys.disturbance_dim();
    p.cost = block_diag(q_star, gamma_block);
    p.sense = SdpProblem::Sense::maximize;
    p.form = SdpProblem::Form::standard;
    append_gramian_equalities(a_k, sys.bw, sys.x0, p);
    return p;
}

SdpProblem build_lower_sdp(const SystemData& sys, const Matrix& l) {
    sys.validate();
    if (l.rows() != sys.disturbance_dim() || l.cols() != sys.state_dim())
        throw DimensionMismatch("build_lower_sdp: L shape");
    const SymmetricMatrix weight = lower_weight(sys, l);
    const double margin = min_eigenvalue(weight);
    if (margin <= 0.0)
        throw RegularityViolated("lower-value weight Q - gamma^2 L^T L has margin " + std::to_string(margin));

    SdpProblem p;
    p.cone_dim = sys.state_dim() + sys.control_dim();
    p.cost = block_diag(weight, sys.r);
    p.sense = SdpProblem::Sense::minimize;
    p.form = SdpProblem::Form::standard;
    append_gramian_equalities(sys.a + sys.bw * l, sys.b, sys.x0, p);
    return p;
}

SdpProblem build_dual_upper(const SystemData& sys, const Matrix& k) {
    sys.validate();
    const Matrix a_k = sys.a + sys.b * k;
    if (!is_hurwitz(a_k)) throw NotHurwitz("build_dual_upper requires a stabilizing K");
    const SymmetricMatrix q_star = symmetrize(sys.q.mat() + k.transpose() * sys.r.mat() * k);
    const SymmetricMatrix gamma_block =
        SymmetricMatrix(Matrix::identity(sys.disturbance_dim()) * (-sys.gamma * sys.gamma));
    return build_dual_blockwise(a_k, sys.bw, sys.x0, block_diag(q_star, gamma_block),
                                SdpProblem::Sense::minimize);
}

SdpProblem build_dual_lower(const SystemData& sys, const Matrix& l) {
    sys.validate();
    return build_dual_blockwise(sys.a + sys.bw * l, sys.b, sys.x0, block_diag(lower_weight(sys, l), sys.r),
                                SdpProblem::Sense::maximize);
}

std::pair<bool, bool> verify_completed_squares(const SystemData& sys, const AreSolution& sol) {
    const SymmetricMatrix res = riccati_residual(sys, sol.p);
    const PolicyPair pol = extract_policies(sys, sol);
    const Matrix pm = sol.p.mat();
    const double inv_g2 = 1.0 / (sys.gamma * sys.gamma);

    // Upper side: R(P) <= -(K + R^-1 B^T P)^T R (K + R^-1 B^T P).
    Matrix u = pol.k;
    if (sys.control_dim() > 0) u += lu_solve(sys.r.mat(), sys.b.transpose() * pm);
    const Matrix upper_rhs = -(u.transpose() * sys.r.mat() * u);
    const bool upper_ok = max_eigenvalue(symmetrize(res.mat() - upper_rhs)) <= 1e-7;

    // Lower side: R(P) >= gamma^2 (L - gamma^-2 Bw^T P)^T (L - gamma^-2 Bw^T P).
    Matrix v = pol.l;
    if (sys.disturbance_dim() > 0) v -= sys.bw.transpose() * pm * inv_g2;
    const Matrix lower_rhs = v.transpose() * v * (sys.gamma * sys.gamma);
    const bool lower_ok = min_eigenvalue(symmetrize(res.mat() - lower_rhs)) >= -1e-7;

    return {upper_ok, lower_ok};
}

GramianMatrix candidate_gramian(const SystemData& sys, const Matrix& a_cl, const Matrix& gain) {
    if (a_cl.rows() != sys.state_dim() || gain.cols() != sys.state_dim())
        throw DimensionMismatch("candidate_gramian shapes");
    const SymmetricMatrix z11 = state_gramian(a_cl, sys.x0);

    const int n = sys.state_dim();
    const int k = gain.rows();
    Matrix embed(n + k, n);
    embed.set_block(0, 0, Matrix::identity(n));
    embed.set_block(n, 0, gain);

    GramianMatrix g;
    g.z = symmetrize(embed * z11.mat() * embed.transpose());
    g.state_dim = n;
    g.partner_dim = k;
    return g;
}

namespace {

// Divergence classifier for unstable closed loops: integrate the quadratic
// cost along the autonomous flow and look at the sign of its increments over
// doubling horizons. Mixed or vanishing increments fall back to the positive
// branch, which is the convention for a zero quadratic rate on an unstable
// trajectory.
CostValue classify_divergence(const Matrix& a_cl, const SymmetricMatrix& w, const Vector& x0) {
    const int n = a_cl.rows();
    const double h = 1e-3;
    const double checkpoints[] = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};

    Vector x = x0;
    double x0_scale = 1.0;
    for (double xi : x0) x0_scale = std::max(x0_scale, std::abs(xi));
    double t = 0.0;
    double j_acc = 0.0;
    double rate_prev = quadratic_form(w, x);
    std::vector<double> increments;
    double j_prev_checkpoint = 0.0;

    Vector k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size()), stage(x.size());
    auto matvec = [&](const Vector& in, Vector& out) {
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += a_cl(i, j) * in[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = s;
        }
    };

    bool truncated = false;
    for (double t_stop : checkpoints) {
        while (t < t_stop - 0.5 * h) {
            matvec(x, k1);
            for (int i = 0; i < n; ++i) stage[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + 0.5 * h * k1[static_cast<std::size_t>(i)];
            matvec(stage, k2);
            for (int i = 0; i < n; ++i) stage[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + 0.5 * h * k2[static_cast<std::size_t>(i)];
            matvec(stage, k3);
            for (int i = 0; i < n; ++i) stage[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + h * k3[static_cast<std::size_t>(i)];
            matvec(stage, k4);
            for (int i = 0; i < n; ++i)
                x[static_cast<std::size_t>(i)] += h / 6.0 *
                    (k1[static_cast<std::size_t>(i)] + 2.0 * k2[static_cast<std::size_t>(i)] +
                     2.0 * k3[static_cast<std::size_t>(i)] + k4[static_cast<std::size_t>(i)]);
            t += h;
            const double rate = quadratic_form(w, x);
            j_acc += 0.5 * h * (rate_prev + rate);
            rate_prev = rate;
            double xmax = 0.0;
            for (double xi : x) xmax = std::max(xmax, std::abs(xi));
            // Once the state has blown up by twelve decades the later windows
            // can only amplify the already-dominant increment sign.
            if ((xmax > 1e12 * x0_scale && !increments.empty()) || !std::isfinite(j_acc)) {
                truncated = true;
                break;
            }
        }
        increments.push_back(j_acc - j_prev_checkpoint);
        j_prev_checkpoint = j_acc;
        if (truncated) break;
    }

    // Under exponential growth the last window dominates; classify by the
    // sign of the increments that are within six decades of the largest one.
    double magnitude = 0.0;
    for (double d : increments) magnitude = std::max(magnitude, std::abs(d));

    CostValue cv;
    cv.kind = CostValue::Kind::divergent_positive;
    if (magnitude > 1e-15 * std::max(1.0, std::abs(j_acc))) {
        bool any_pos = false, any_neg = false;
        for (double d : increments) {
            if (std::abs(d) < 1e-6 * magnitude) continue;
            (d > 0.0 ? any_pos : any_neg) = true;
        }
        if (any_neg && !any_pos) cv.kind = CostValue::Kind::divergent_negative;
    }
    return cv;
}

}  // namespace

CostValue evaluate_linear_cost(const SystemData& sys, const Matrix& k, const Matrix& l) {
    if (k.rows() != sys.control_dim() || k.cols() != sys.state_dim())
        throw DimensionMismatch("evaluate_linear_cost: K shape");
    if (l.rows() != sys.disturbance_dim() || l.cols() != sys.state_dim())
        throw DimensionMismatch("evaluate_linear_cost: L shape");

    Matrix a_cl = sys.a;
    if (sys.control_dim() > 0) a_cl += sys.b * k;
    if (sys.disturbance_dim() > 0) a_cl += sys.bw * l;

    Matrix wmat = sys.q.mat();
    if (sys.control_dim() > 0) wmat += k.transpose() * sys.r.mat() * k;
    if (sys.disturbance_dim() > 0) wmat -= l.transpose() * l * (sys.gamma * sys.gamma);
    const SymmetricMatrix w = symmetrize(wmat);

    if (is_hurwitz(a_cl)) {
        const SymmetricMatrix p_cl = solve_lyapunov(a_cl, w, LyapunovSide::left);
        CostValue cv;
        cv.kind = CostValue::Kind::finite;
        cv.amount = quadratic_form(p_cl, sys.x0);
        return cv;
    }
    return classify_divergence(a_cl, w, sys.x0);
}

ValueReport solve_game(const SystemData& sys, const GameSolveOptions& opts) {
    sys.validate();

    ValueReport rep;
    rep.are = solve_game_are(sys);
    if (!rep.are.is_stabilizing)
        throw CertificateAbsent("game Riccati solution is not stabilizing");
    rep.policies = extract_policies(sys, rep.are);
    rep.regularity = rep.are.regularity;
    rep.value = quadratic_form(rep.are.p, sys.x0);

    const Vector p_vec = svec(rep.are.p);

    const SdpProblem upper = build_upper_sdp(sys, rep.policies.k);
    const SdpSolution upper_sol = solve_ipm(upper, opts.ipm_tol);
    rep.upper_sdp_value = upper_sol.primal_obj;
    rep.ipm_iterations += upper_sol.iterations;

    const SdpProblem upper_dual = build_dual_upper(sys, rep.policies.k);
    const SdpSolution upper_dual_sol = solve_ipm(upper_dual, opts.ipm_tol);
    rep.upper_dual_value = upper_dual_sol.primal_obj;
    rep.ipm_iterations += upper_dual_sol.iterations;

    const GramianMatrix z_star = candidate_gramian(sys, rep.are.closed_loop, rep.policies.l);
    rep.kkt_upper = check_kkt(upper, z_star.z, p_vec, opts.cert_tol);

    if (rep.regularity) {
        const SdpProblem lower = build_lower_sdp(sys, rep.policies.l);
        const SdpSolution lower_sol = solve_ipm(lower, opts.ipm_tol);
        rep.lower_sdp_value = lower_sol.primal_obj;
        rep.ipm_iterations += lower_sol.iterations;

        const SdpProblem lower_dual = build_dual_lower(sys, rep.policies.l);
        const SdpSolution lower_dual_sol = solve_ipm(lower_dual, opts.ipm_tol);
        rep.lower_dual_value = lower_dual_sol.primal_obj;
        rep.ipm_iterations += lower_dual_sol.iterations;

        const GramianMatrix z_hat = candidate_gramian(sys, rep.are.closed_loop, rep.policies.k);
        rep.kkt_lower = check_kkt(lower, z_hat.z, p_vec, opts.cert_tol);

        const double spread = std::abs(rep.upper_sdp_value - *rep.lower_sdp_value);
        rep.saddle_certified = rep.kkt_upper.verdict && rep.kkt_lower->verdict &&
                               spread <= opts.value_tol * (1.0 + std::abs(rep.value));
    }
    return rep;
}

bool verify_saddle_sampling(const SystemData& sys, const ValueReport& report,
                            const std::vector<std::pair<Matrix, Matrix>>& grid, double tol) {
    for (const auto& [k, l] : grid) {
        const CostValue left = evaluate_linear_cost(sys, report.policies.k, l);
        if (left.finite()) {
            if (left.amount > report.value + tol) return false;
        } else if (left.kind == CostValue::Kind::divergent_positive) {
            return false;
        }
        const CostValue right = evaluate_linear_cost(sys, k, report.policies.l);
        if (right.finite()) {
            if (right.amount < report.value - tol) return false;
        } else if (right.kind == CostValue::Kind::divergent_negative) {
            return false;
        }
    }
    return true;
}

std::vector<LandscapePoint> landscape_grid(const SystemData& sys, double k_lo, double k_hi, double l_lo, double l_hi,
                                           int steps, double clip) {
    if (sys.state_dim() != 1 || sys.control_dim() != 1 || sys.disturbance_dim() != 1)
        throw NotScalar("landscape_grid needs n = m = p = 1");
    if (steps < 1) throw DimensionMismatch("landscape_grid: steps must be >= 1");

    auto coordinate = [steps](double lo, double hi, int i) {
        return steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
    };

    std::vector<LandscapePoint> out;
    out.reserve(static_cast<std::size_t>(steps) * steps);
    for (int ik = 0; ik < steps; ++ik) {
        const double kv = coordinate(k_lo, k_hi, ik);
        for (int il = 0; il < steps; ++il) {
            const double lv = coordinate(l_lo, l_hi, il);
            const CostValue cv = evaluate_linear_cost(sys, Matrix{{kv}}, Matrix{{lv}});
            double j = 0.0;
            if (cv.finite())
                j = std::clamp(cv.amount, -clip, clip);
            else
                j = cv.kind == CostValue::Kind::divergent_positive ? clip : -clip;
            out.push_back({kv, lv, j});
        }
    }
    return out;
}

}  // namespace lqgame

#include "lqgame/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lqgame {

EigenDecomposition sym_eig(const SymmetricMatrix& m) {
    const int n = m.dim();
    Matrix a = m.mat();
    Matrix v = Matrix::identity(n);
    const double stop = 1e-12 * (1.0 + m.frobenius_norm());

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    bool converged = (n <= 1) || off_norm() <= stop;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        converged = off_norm() <= stop;
    }
    if (!converged) throw NoConvergence("Jacobi eigensolver exceeded 100 sweeps");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

    EigenDecomposition r;
    r.eigenvalues.resize(static_cast<std::size_t>(n));
    r.eigenvectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        const int src = order[static_cast<std::size_t>(j)];
        r.eigenvalues[static_cast<std::size_t>(j)] = a(src, src);
        for (int i = 0; i < n; ++i) r.eigenvectors(i, j) = v(i, src);
    }
    return r;
}

double min_eigenvalue(const SymmetricMatrix& m) {
    if (m.dim() == 0) throw DimensionMismatch("min_eigenvalue of empty matrix");
    return sym_eig(m).eigenvalues.front();
}

double max_eigenvalue(const SymmetricMatrix& m) {
    if (m.dim() == 0) throw DimensionMismatch("max_eigenvalue of empty matrix");
    return sym_eig(m).eigenvalues.back();
}

SymmetricMatrix sym_sqrt(const SymmetricMatrix& m) {
    const EigenDecomposition e = sym_eig(m);
    const int n = m.dim();
    Matrix d(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = std::sqrt(std::max(e.eigenvalues[static_cast<std::size_t>(i)], 0.0));
    return SymmetricMatrix(e.eigenvectors * d * e.eigenvectors.transpose());
}

SymmetricMatrix sym_pinv(const SymmetricMatrix& m) {
    const EigenDecomposition e = sym_eig(m);
    const int n = m.dim();
    const double lmax = std::abs(e.eigenvalues.empty() ? 0.0 : *std::max_element(
        e.eigenvalues.begin(), e.eigenvalues.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }));
    Matrix d(n, n);
    for (int i = 0; i < n; ++i) {
        const double lam = e.eigenvalues[static_cast<std::size_t>(i)];
        d(i, i) = std::abs(lam) > 1e-12 * std::max(lmax, 1e-300) ? 1.0 / lam : 0.0;
    }
    return SymmetricMatrix(e.eigenvectors * d * e.eigenvectors.transpose());
}

SymmetricMatrix solve_lyapunov(const Matrix& a, const SymmetricMatrix& w, LyapunovSide side) {
    if (!a.is_square()) throw DimensionMismatch("Lyapunov: A must be square");
    if (a.rows() != w.dim()) throw DimensionMismatch("Lyapunov: A and W dimensions differ");
    const int n = a.rows();

    // Left form: vec(A^T X) = (I (x) A^T) vec(X), vec(X A) = (A^T (x) I) vec(X).
    // The right form swaps A for A^T throughout.
    const Matrix at = (side == LyapunovSide::left) ? a.transpose() : a;
    Matrix op(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // row index of entry (i, j) of the matrix equation, vec is row-major here
            const int row = i * n + j;
            for (int k = 0; k < n; ++k) {
                op(row, k * n + j) += at(i, k);  // (A^T X)_{ij} = sum_k at_{ik} X_{kj}
                op(row, i * n + k) += at(j, k);  // (X A)_{ij} = sum_k X_{ik} a_{kj} = sum_k at_{jk} X_{ik}
            }
        }

    Vector rhs(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rhs[static_cast<std::size_t>(i) * n + j] = -w(i, j);

    Vector x;
    try {
        x = lu_solve(op, rhs);
    } catch (const SingularOperator&) {
        throw SingularOperator("Lyapunov operator is rank-deficient (eigenvalue pair of A sums to zero)");
    }

    Matrix sol(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sol(i, j) = x[static_cast<std::size_t>(i) * n + j];
    return symmetrize(sol);
}

bool is_hurwitz(const Matrix& a) {
    if (!a.is_square()) throw DimensionMismatch("is_hurwitz: A must be square");
    if (a.rows() == 0) return true;
    try {
        const SymmetricMatrix x = solve_lyapunov(a, SymmetricMatrix::identity(a.rows()), LyapunovSide::left);
        return min_eigenvalue(x) > 0.0;
    } catch (const SingularOperator&) {
        return false;
    }
}

SymmetricMatrix state_gramian(const Matrix& a_cl, const Vector& x0) {
    if (a_cl.rows() != static_cast<int>(x0.size())) throw DimensionMismatch("state_gramian: x0 length");
    if (!is_hurwitz(a_cl)) throw NotHurwitz("state_gramian requires a Hurwitz closed loop");
    return solve_lyapunov(a_cl, SymmetricMatrix(outer(x0, x0)), LyapunovSide::right);
}

Signal simulate_lti(const Matrix& a, const Matrix& b_in, const Vector& x0, const Signal& input, double step) {
    const int n = a.rows();
    if (!a.is_square()) throw DimensionMismatch("simulate_lti: A must be square");
    if (b_in.rows() != n || b_in.cols() != input.dim()) throw DimensionMismatch("simulate_lti: B_in shape");
    if (static_cast<int>(x0.size()) != n) throw DimensionMismatch("simulate_lti: x0 length");
    if (step <= 0.0) throw DimensionMismatch("simulate_lti: step must be positive");

    auto deriv = [&](const Vector& x, double t) {
        Vector dx = a.apply(x);
        const Vector u = input.at(t);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < b_in.cols(); ++j) s += b_in(i, j) * u[static_cast<std::size_t>(j)];
            dx[static_cast<std::size_t>(i)] += s;
        }
        return dx;
    };

    const double t0 = input.start_time();
    const double t_end = input.end_time();
    const int steps = static_cast<int>(std::floor((t_end - t0) / step + 1e-9));

    std::vector<double> times;
    std::vector<Vector> states;
    times.reserve(static_cast<std::size_t>(steps) + 1);
    states.reserve(static_cast<std::size_t>(steps) + 1);

    Vector x = x0;
    times.push_back(t0);
    states.push_back(x);
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + step * k;
        const Vector k1 = deriv(x, t);
        Vector x2 = x;
        for (int i = 0; i < n; ++i) x2[static_cast<std::size_t>(i)] += 0.5 * step * k1[static_cast<std::size_t>(i)];
        const Vector k2 = deriv(x2, t + 0.5 * step);
        Vector x3 = x;
        for (int i = 0; i < n; ++i) x3[static_cast<std::size_t>(i)] += 0.5 * step * k2[static_cast<std::size_t>(i)];
        const Vector k3 = deriv(x3, t + 0.5 * step);
        Vector x4 = x;
        for (int i = 0; i < n; ++i) x4[static_cast<std::size_t>(i)] += step * k3[static_cast<std::size_t>(i)];
        const Vector k4 = deriv(x4, t + step);
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] += step / 6.0 *
                (k1[static_cast<std::size_t>(i)] + 2.0 * k2[static_cast<std::size_t>(i)] +
                 2.0 * k3[static_cast<std::size_t>(i)] + k4[static_cast<std::size_t>(i)]);
        }
        times.push_back(t0 + step * (k + 1));
        states.push_back(x);
    }
    return Signal(std::move(times), std::move(states));
}

double freq_response(const Matrix& a, const Matrix& b_in, const Matrix& c_out, double omega) {
    const int n = a.rows();
    if (!a.is_square() || b_in.rows() != n || c_out.cols() != n) throw DimensionMismatch("freq_response shapes");
    if (!is_hurwitz(a)) throw NotHurwitz("freq_response requires a Hurwitz state matrix");

    // Solve (jwI - A)(Vr + jVi) = B as the real block system
    //   [[-A, -wI], [wI, -A]] [Vr; Vi] = [B; 0].
    Matrix block(2 * n, 2 * n);
    block.set_block(0, 0, -a);
    block.set_block(n, n, -a);
    for (int i = 0; i < n; ++i) {
        block(i, n + i) = -omega;
        block(n + i, i) = omega;
    }
    Matrix rhs(2 * n, b_in.cols());
    rhs.set_block(0, 0, b_in);
    const Matrix sol = lu_solve(block, rhs);
    const Matrix vr = sol.block(0, 0, n, b_in.cols());
    const Matrix vi = sol.block(n, 0, n, b_in.cols());

    const Matrix gr = c_out * vr;
    const Matrix gi = c_out * vi;

    // sigma_max(G)^2 = lambda_max(G^H G); the Hermitian matrix is embedded as
    // the real symmetric [[Hr, -Hi], [Hi, Hr]] with doubled spectrum.
    const Matrix hr = gr.transpose() * gr + gi.transpose() * gi;
    const Matrix hi = gr.transpose() * gi - gi.transpose() * gr;
    const int q = hr.rows();
    Matrix emb(2 * q, 2 * q);
    emb.set_block(0, 0, hr);
    emb.set_block(q, q, hr);
    emb.set_block(0, q, -hi);
    emb.set_block(q, 0, hi);
    const double lmax = max_eigenvalue(SymmetricMatrix(emb));
    return std::sqrt(std::max(lmax, 0.0));
}

}  // namespace lqgame

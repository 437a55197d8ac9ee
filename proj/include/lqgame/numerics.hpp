#pragma once

#include <utility>

#include "lqgame/matrix.hpp"
#include "lqgame/signal.hpp"

namespace lqgame {

enum class LyapunovSide { left, right };

struct EigenDecomposition {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // columns, same order
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Stops when the
/// off-diagonal Frobenius norm falls below 1e-12 * (1 + ||M||_F); 100-sweep cap.
EigenDecomposition sym_eig(const SymmetricMatrix& m);

double min_eigenvalue(const SymmetricMatrix& m);
double max_eigenvalue(const SymmetricMatrix& m);

/// Symmetric PSD square root via eigendecomposition (negative eigenvalues
/// within roundoff are clamped to zero).
SymmetricMatrix sym_sqrt(const SymmetricMatrix& m);

/// Moore-Penrose pseudo-inverse of a symmetric matrix; eigenvalues below
/// 1e-12 * lambda_max are treated as zero.
SymmetricMatrix sym_pinv(const SymmetricMatrix& m);

/// Solves A^T X + X A + W = 0 (left) or A X + X A^T + W = 0 (right) by dense
/// Kronecker vectorization: (I (x) A^T + A^T (x) I) vec(X) = -vec(W) for the
/// left form. Throws SingularOperator when some eigenvalue pair of A sums to
/// zero (marginal or mirrored spectra).
SymmetricMatrix solve_lyapunov(const Matrix& a, const SymmetricMatrix& w, LyapunovSide side);

/// Lyapunov stability test: true iff A^T X + X A + I = 0 has a positive
/// definite solution. Marginal spectra make the operator singular and are
/// classified not-Hurwitz.
bool is_hurwitz(const Matrix& a);

/// State Gramian of the autonomous flow x' = A_cl x from x0, i.e. the solution
/// of A_cl Z + Z A_cl^T + x0 x0^T = 0. Requires A_cl Hurwitz.
SymmetricMatrix state_gramian(const Matrix& a_cl, const Vector& x0);

/// Classic fourth-order one-step integration of x' = A x + B_in u(t) over the
/// input signal's horizon; u is linearly interpolated at half steps.
Signal simulate_lti(const Matrix& a, const Matrix& b_in, const Vector& x0, const Signal& input, double step);

/// Largest singular value of C_out (jwI - A)^{-1} B_in at a single frequency,
/// computed through the real 2n x 2n embedding [[-A, -wI], [wI, -A]].
double freq_response(const Matrix& a, const Matrix& b_in, const Matrix& c_out, double omega);

}  // namespace lqgame

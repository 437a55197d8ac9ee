#pragma once

#include "lqgame/matrix.hpp"
#include "lqgame/numerics.hpp"

namespace lqgame {

/// Game instance: dynamics x' = A x + B u + Bw w, cost weights Q > 0, R > 0,
/// attenuation level gamma > 0, initial state x0.
struct SystemData {
    Matrix a;
    Matrix b;
    Matrix bw;
    SymmetricMatrix q;
    SymmetricMatrix r;
    double gamma = 1.0;
    Vector x0;

    int state_dim() const { return a.rows(); }
    int control_dim() const { return b.cols(); }
    int disturbance_dim() const { return bw.cols(); }

    /// Shape consistency, Q > 0, R > 0, gamma > 0.
    void validate() const;
};

struct AreSolution {
    SymmetricMatrix p;
    Matrix closed_loop;       // A + B K + Bw L for the extracted policies
    double residual_norm = 0.0;
    bool is_stabilizing = false;
    bool is_psd = false;
    bool regularity = false;  // Q - gamma^-2 P Bw Bw^T P > 0
    double regularity_margin = 0.0;
};

struct PolicyPair {
    Matrix k;  // control gain, m x n
    Matrix l;  // disturbance gain, p x n
};

/// A^T P + P A + Q - P B R^-1 B^T P + gamma^-2 P Bw Bw^T P.
SymmetricMatrix riccati_residual(const SystemData& sys, const SymmetricMatrix& p);

/// Bass construction of a stabilizing state feedback: with beta = 1 + ||A||_F,
/// solve (A + beta I) W + W (A + beta I)^T = 2 B B^T and take K0 = -B^T W^+.
/// Throws StabilizationFailed when A + B K0 is not Hurwitz.
Matrix initial_stabilizing_gain(const Matrix& a, const Matrix& b);

/// Newton-Kleinman iteration for the LQR Riccati equation, seeded by
/// initial_stabilizing_gain. The returned solution carries the game fields
/// evaluated with Bw = 0.
AreSolution solve_lqr_are(const Matrix& a, const Matrix& b, const SymmetricMatrix& q, const SymmetricMatrix& r);

/// Stabilizing solution of the game Riccati equation by continuation in
/// theta over [0, gamma^-2]: the disturbance quadratic term is switched on
/// gradually, each theta step re-converged by Newton against the current
/// closed loop. Throws CertificateAbsent when the continuation loses the
/// stabilizing property before reaching gamma^-2.
AreSolution solve_game_are(const SystemData& sys);

/// K = -R^-1 B^T P, L = gamma^-2 Bw^T P.
PolicyPair extract_policies(const SystemData& sys, const AreSolution& sol);

}  // namespace lqgame

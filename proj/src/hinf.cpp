#include "lqgame/hinf.hpp"

#include <algorithm>
#include <cmath>

#include "lqgame/numerics.hpp"

namespace lqgame {

namespace {

// z = [Q^1/2; R^1/2 K] x for the loop closed with u = K x.
Matrix performance_output(const SystemData& sys, const Matrix& k) {
    const int n = sys.state_dim();
    const int m = sys.control_dim();
    Matrix c(n + m, n);
    c.set_block(0, 0, sym_sqrt(sys.q).mat());
    if (m > 0) c.set_block(n, 0, sym_sqrt(sys.r).mat() * k);
    return c;
}

void require_zero_x0(const SystemData& sys) {
    for (double v : sys.x0)
        if (v != 0.0) throw NonzeroInitialState("H-infinity certification is defined for x(0) = 0");
}

}  // namespace

HinfCertificate certify(const SystemData& sys, double gamma) {
    require_zero_x0(sys);
    SystemData s = sys;
    s.gamma = gamma;
    s.validate();

    HinfCertificate cert;
    cert.gamma = gamma;

    AreSolution sol;
    try {
        sol = solve_game_are(s);
    } catch (const CertificateAbsent&) {
        return cert;
    } catch (const NoConvergence&) {
        return cert;
    }
    if (!sol.is_psd || !sol.is_stabilizing) return cert;

    cert.p = sol.p;
    cert.k = extract_policies(s, sol).k;
    const Matrix a_k = s.a + s.b * cert.k;
    if (!is_hurwitz(a_k)) return cert;

    cert.certified = true;
    cert.sweep_norm = hinf_norm_sweep(a_k, s.bw, performance_output(s, cert.k));
    cert.margin = gamma - cert.sweep_norm;
    return cert;
}

double hinf_norm_sweep(const Matrix& a_cl, const Matrix& bw, const Matrix& c_out) {
    if (!is_hurwitz(a_cl)) throw NotHurwitz("hinf_norm_sweep requires a Hurwitz loop");
    if (bw.cols() == 0 || c_out.rows() == 0 || c_out.max_abs() == 0.0) return 0.0;

    constexpr int kGridPoints = 400;
    const double log_lo = -4.0;
    const double log_hi = 4.0;

    auto gain_at_log = [&](double lg) { return freq_response(a_cl, bw, c_out, std::pow(10.0, lg)); };

    int argmax = 0;
    double best = -1.0;
    std::vector<double> logs(kGridPoints);
    for (int i = 0; i < kGridPoints; ++i) {
        logs[static_cast<std::size_t>(i)] = log_lo + (log_hi - log_lo) * i / (kGridPoints - 1);
        const double g = gain_at_log(logs[static_cast<std::size_t>(i)]);
        if (g > best) {
            best = g;
            argmax = i;
        }
    }

    // Golden-section refinement (in log frequency) around the argmax bracket.
    double lo = logs[static_cast<std::size_t>(std::max(argmax - 1, 0))];
    double hi = logs[static_cast<std::size_t>(std::min(argmax + 1, kGridPoints - 1))];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = gain_at_log(x1);
    double f2 = gain_at_log(x2);
    // log-bracket width 4e-7 keeps the frequency itself within 1e-6 relative.
    while (hi - lo > 4e-7) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = gain_at_log(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = gain_at_log(x2);
        }
        best = std::max(best, std::max(f1, f2));
    }
    return best;
}

BisectResult bisect_gamma(const SystemData& sys, double lo, double hi, double tol) {
    if (!(lo > 0.0) || !(hi > lo) || !(tol > 0.0)) throw BadBracket("need 0 < lo < hi and tol > 0");

    BisectResult out;
    const bool lo_cert = certify(sys, lo).certified;
    out.trace.push_back({lo, lo_cert});
    if (lo_cert) throw BadBracket("certificate already exists at lo");
    const bool hi_cert = certify(sys, hi).certified;
    out.trace.push_back({hi, hi_cert});
    if (!hi_cert) throw BadBracket("certificate absent at hi");

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const bool ok = certify(sys, mid).certified;
        out.trace.push_back({mid, ok});
        (ok ? hi : lo) = mid;
    }
    out.gamma_hat = 0.5 * (lo + hi);
    return out;
}

DeviationReport deviation_identity_check(const SystemData& sys, const HinfCertificate& cert, const Signal& w) {
    if (!cert.certified) throw NotCertified("deviation_identity_check needs a certified loop");
    if (w.dim() != sys.disturbance_dim()) throw DimensionMismatch("disturbance signal dimension");
    require_zero_x0(sys);

    const int n = sys.state_dim();
    const Matrix a_k = sys.a + sys.b * cert.k;
    const Matrix l_gain = sys.bw.transpose() * cert.p.mat() * (1.0 / (cert.gamma * cert.gamma));
    const SymmetricMatrix q_star = symmetrize(sys.q.mat() + cert.k.transpose() * sys.r.mat() * cert.k);

    double energy_z = 0.0, energy_w = 0.0, energy_dev = 0.0;
    double prev_z = 0.0, prev_w = 0.0, prev_dev = 0.0;
    bool have_prev = false;
    const double step = w.step();

    auto accumulate = [&](const Vector& x, const Vector& w_now) {
        const double rz = quadratic_form(q_star, x);
        const double rw = dot(w_now, w_now);
        Vector dev = w_now;
        const Vector lx = l_gain.apply(x);
        for (std::size_t i = 0; i < dev.size(); ++i) dev[i] -= lx[i];
        const double rdev = dot(dev, dev);
        if (have_prev) {
            energy_z += 0.5 * step * (prev_z + rz);
            energy_w += 0.5 * step * (prev_w + rw);
            energy_dev += 0.5 * step * (prev_dev + rdev);
        }
        prev_z = rz;
        prev_w = rw;
        prev_dev = rdev;
        have_prev = true;
    };

    // Driven phase over the disturbance horizon.
    const Signal x_sig = simulate_lti(a_k, sys.bw, Vector(static_cast<std::size_t>(n), 0.0), w, step);
    double peak = 0.0;
    for (int kk = 0; kk < x_sig.sample_count(); ++kk) {
        accumulate(x_sig.value(kk), w.at(x_sig.times()[static_cast<std::size_t>(kk)]));
        peak = std::max(peak, norm2(x_sig.value(kk)));
    }

    // Free tail with w = 0 until the state has died out.
    Vector x = x_sig.value(x_sig.sample_count() - 1);
    double t = x_sig.end_time();
    const Vector w_zero(static_cast<std::size_t>(sys.disturbance_dim()), 0.0);
    const double floor = 1e-8 * (1.0 + peak);
    const double t_cap = t + 400.0;
    while (norm2(x) > floor && t < t_cap) {
        const Signal chunk = Signal::zero(t, step, static_cast<int>(5.0 / step) + 1, sys.disturbance_dim());
        const Signal xs = simulate_lti(a_k, sys.bw, x, chunk, step);
        for (int kk = 1; kk < xs.sample_count(); ++kk) accumulate(xs.value(kk), w_zero);
        x = xs.value(xs.sample_count() - 1);
        t = xs.end_time();
    }

    DeviationReport rep;
    const double g2 = cert.gamma * cert.gamma;
    rep.lhs = energy_z - g2 * energy_w;
    rep.rhs = -g2 * energy_dev;
    rep.ok = std::abs(rep.lhs - rep.rhs) <= 1e-3 * (1.0 + std::abs(rep.lhs));
    return rep;
}

}  // namespace lqgame

#include "lqgame/signal.hpp"

#include <cmath>

namespace lqgame {

Signal::Signal(std::vector<double> sample_times, std::vector<Vector> values)
    : times_(std::move(sample_times)), values_(std::move(values)) {
    if (times_.size() < 2) throw DimensionMismatch("signal needs at least 2 samples");
    if (times_.size() != values_.size()) throw DimensionMismatch("signal times/values length mismatch");
    step_ = times_[1] - times_[0];
    if (step_ <= 0.0) throw DimensionMismatch("signal times must be strictly increasing");
    for (std::size_t k = 1; k < times_.size(); ++k) {
        const double dt = times_[k] - times_[k - 1];
        if (std::abs(dt - step_) > 1e-12 * std::max(1.0, std::abs(step_)))
            throw DimensionMismatch("signal sampling is not uniform");
    }
    const std::size_t d = values_.front().size();
    for (const Vector& v : values_) {
        if (v.size() != d) throw DimensionMismatch("signal value dimension varies");
        for (double x : v)
            if (!std::isfinite(x)) throw NonFiniteValue("signal value");
    }
}

Signal Signal::sampled(double t0, double step, int count, int dim, const std::function<Vector(double)>& fn) {
    std::vector<double> times(static_cast<std::size_t>(count));
    std::vector<Vector> values(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double t = t0 + step * k;
        times[static_cast<std::size_t>(k)] = t;
        Vector v = fn(t);
        if (static_cast<int>(v.size()) != dim) throw DimensionMismatch("sampled signal dimension");
        values[static_cast<std::size_t>(k)] = std::move(v);
    }
    return Signal(std::move(times), std::move(values));
}

Signal Signal::zero(double t0, double step, int count, int dim) {
    return sampled(t0, step, count, dim, [dim](double) { return Vector(static_cast<std::size_t>(dim), 0.0); });
}

Vector Signal::at(double t) const {
    if (t <= times_.front()) return values_.front();
    if (t >= times_.back()) return values_.back();
    const double u = (t - times_.front()) / step_;
    const int k = static_cast<int>(u);
    const double frac = u - k;
    const Vector& a = values_[static_cast<std::size_t>(k)];
    const Vector& b = values_[static_cast<std::size_t>(k) + 1];
    Vector v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = (1.0 - frac) * a[i] + frac * b[i];
    return v;
}

double signal_energy(const Signal& s) {
    double total = 0.0;
    double prev = dot(s.value(0), s.value(0));
    for (int k = 1; k < s.sample_count(); ++k) {
        const double cur = dot(s.value(k), s.value(k));
        total += 0.5 * (prev + cur) * s.step();
        prev = cur;
    }
    return total;
}

}  // namespace lqgame

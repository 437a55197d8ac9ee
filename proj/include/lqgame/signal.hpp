#pragma once

#include <functional>
#include <vector>

#include "lqgame/matrix.hpp"

namespace lqgame {

/// Uniformly sampled vector-valued signal. Construction checks that the time
/// grid is strictly increasing and uniform to 1e-12 relative tolerance, and
/// that at least two samples are present.
class Signal {
  public:
    Signal(std::vector<double> sample_times, std::vector<Vector> values);

    /// Samples fn at t0, t0+step, ..., t0+(count-1)*step.
    static Signal sampled(double t0, double step, int count, int dim,
                          const std::function<Vector(double)>& fn);
    static Signal zero(double t0, double step, int count, int dim);

    int sample_count() const { return static_cast<int>(times_.size()); }
    int dim() const { return values_.empty() ? 0 : static_cast<int>(values_.front().size()); }
    double step() const { return step_; }
    double start_time() const { return times_.front(); }
    double end_time() const { return times_.back(); }

    const std::vector<double>& times() const { return times_; }
    const std::vector<Vector>& values() const { return values_; }
    const Vector& value(int k) const { return values_[static_cast<std::size_t>(k)]; }

    /// Linear interpolation inside the sampled horizon; clamps outside it.
    Vector at(double t) const;

  private:
    std::vector<double> times_;
    std::vector<Vector> values_;
    double step_ = 0.0;
};

/// Trapezoidal quadrature of the squared 2-norm over the sampled horizon.
double signal_energy(const Signal& s);

}  // namespace lqgame

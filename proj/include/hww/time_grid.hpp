#pragma once

#include <stdexcept>
#include <vector>

namespace hww {

/// Time layers t^0 < t^1 < ... < t^N. Step n (1-based) spans
/// [layer(n-1), layer(n)].
class TimeGrid {
 public:
  static TimeGrid from_layers(std::vector<double> layers) {
    if (layers.size() < 2) throw std::invalid_argument("time grid needs at least one step");
    for (std::size_t i = 1; i < layers.size(); ++i)
      if (!(layers[i] > layers[i - 1]))
        throw std::invalid_argument("time layers must be strictly increasing");
    TimeGrid g;
    g.layers_ = std::move(layers);
    return g;
  }

  static TimeGrid uniform(double t_begin, double t_end, int steps) {
    if (steps < 1) throw std::invalid_argument("time grid needs at least one step");
    std::vector<double> layers(steps + 1);
    const double dt = (t_end - t_begin) / steps;
    for (int n = 0; n <= steps; ++n) layers[n] = t_begin + n * dt;
    layers.back() = t_end;
    return from_layers(std::move(layers));
  }

  int steps() const { return static_cast<int>(layers_.size()) - 1; }
  double layer(int n) const { return layers_[n]; }
  double dt(int step) const { return layers_[step] - layers_[step - 1]; }
  const std::vector<double>& layers() const { return layers_; }

 private:
  std::vector<double> layers_;
};

}  // namespace hww

#pragma once

#include <cmath>
#include <vector>

#include "qlink/error.hpp"
#include "qlink/types.hpp"

namespace qlink {

enum class LayerParity { Odd, Even };

// Suzuki-Trotter layer schedule: exp(gamma sum_x h_{x,x+1}) ~ product of
// odd/even gate layers with splitting coefficients of order p.
struct TrotterSchedule {
  int order = 2;
  cx gamma;  // i*dt for real time, -dt/2 for imaginary time
  struct Layer {
    LayerParity parity;
    double coeff;
  };
  std::vector<Layer> layers;

  double coefficient_sum(LayerParity p) const {
    double s = 0.0;
    for (const auto& l : layers)
      if (l.parity == p) s += l.coeff;
    return s;
  }
};

inline TrotterSchedule trotter_schedule(int order, cx gamma) {
  TrotterSchedule s;
  s.order = order;
  s.gamma = gamma;
  using P = LayerParity;
  switch (order) {
    case 1:
      s.layers = {{P::Odd, 1.0}, {P::Even, 1.0}};
      break;
    case 2:
      s.layers = {{P::Odd, 0.5}, {P::Even, 1.0}, {P::Odd, 0.5}};
      break;
    case 4: {
      // Forest-Ruth: three nested symmetric splittings with steps
      // theta, 1-2*theta, theta.
      const double theta = 1.0 / (2.0 - std::cbrt(2.0));
      s.layers = {{P::Odd, theta / 2},       {P::Even, theta},
                  {P::Odd, (1 - theta) / 2}, {P::Even, 1 - 2 * theta},
                  {P::Odd, (1 - theta) / 2}, {P::Even, theta},
                  {P::Odd, theta / 2}};
      break;
    }
    default:
      throw ConfigError("unsupported Suzuki-Trotter order (use 1, 2 or 4)");
  }
  return s;
}

}  // namespace qlink

#pragma once

// Validated divergence order for the Renyi family.

#include <cmath>
#include <stdexcept>

namespace relbo {

/// Order parameter of a Renyi entropy or divergence.
///
/// Admissible orders are alpha > 0 with alpha != 1 exactly; orders
/// arbitrarily close to 1 are accepted so limit behaviour can be probed.
/// The Shannon quantities have dedicated functions instead of an alpha = 1
/// special case.
class RenyiOrder {
 public:
  explicit RenyiOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0)) {
      throw std::invalid_argument("RenyiOrder: alpha must be > 0");
    }
    if (alpha == 1.0) {
      throw std::invalid_argument(
          "RenyiOrder: alpha must differ from 1; use the dedicated "
          "Shannon/KL functions for the limit order");
    }
  }

  double alpha() const { return alpha_; }

  /// The ratio alpha / (1 - alpha), used by skew-symmetry identities.
  double delta() const { return alpha_ / (1.0 - alpha_); }

 private:
  double alpha_;
};

}  // namespace relbo

#pragma once

#include "ballchain/types.hpp"

#include <functional>

namespace ballchain {

/// Potential energy split by source, in J.
struct EnergyBreakdown {
  double dipole_dipole = 0.0;  // ball-ball interaction
  double field = 0.0;          // moments in the applied field or external magnet field
  double elastic = 0.0;        // skin or rod bending
  double gravity = 0.0;
  double contact = 0.0;        // non-adjacent ball contact
  double wall = 0.0;           // channel wall penalty, navigation only
  double total = 0.0;

  void sum() { total = dipole_dipole + field + elastic + gravity + contact + wall; }
};

/// Extra energy that depends only on node positions. Writes dU/dp into `gradient` when non-null
/// (same shape as `positions`, accumulated).
using PositionPenalty = std::function<double(const Points& positions, Points* gradient)>;

}  // namespace ballchain

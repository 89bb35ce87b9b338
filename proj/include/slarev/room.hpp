#pragma once

// Shoebox image-source model with source mirroring.

#include "slarev/types.hpp"

#include <array>
#include <vector>

namespace slarev {

struct RoomSpec {
  Vector3d dimensions{1.0, 1.0, 1.0};  // m
  double absorption = 0.5;             // energy absorption, uniform over walls and frequency
  double speed_of_sound = 343.0;

  void validate() const;
  double volume() const { return dimensions.prod(); }
  double surface() const;
  /// 0.161 V / (S alpha)
  double sabine_rt() const;
  /// Amplitude reflection coefficient per bounce, sqrt(1 - alpha).
  double reflection_coefficient() const { return std::sqrt(1.0 - absorption); }
  bool contains(const Vector3d& p) const;
};

struct Placement {
  Vector3d sla_position{0.0, 0.0, 0.0};
  Vector3d sma_position{0.0, 0.0, 0.0};
  /// Columns are the SLA's local axes in room coordinates.
  Eigen::Matrix3d sla_orientation = Eigen::Matrix3d::Identity();

  void validate(const RoomSpec& room) const;
  double direct_distance() const { return (sma_position - sla_position).norm(); }
};

struct Reflection {
  double attenuation = 1.0;  // a_g
  double path_length = 0.0;  // r_g, m
  Direction dor;             // radiation direction in the mirrored SLA frame
  Direction doa;             // arrival direction at the SMA
  int reflection_order = 0;
  std::array<int, 3> parity{0, 0, 0};  // per-axis mirror parity of the image
};

using ReflectionList = std::vector<Reflection>;

/// Radiation direction from an image with the given per-axis parity, as seen in
/// the SLA's (mirrored) local frame. `to_receiver` is receiver minus image position.
Direction mirrored_dor(const Vector3d& to_receiver, const std::array<int, 3>& parity,
                       const Eigen::Matrix3d& orientation);

/// All image sources with path_length / c <= max_time, sorted by path length.
/// The direct path is element 0.
ReflectionList image_sources(const RoomSpec& room, const Placement& placement, double max_time);

}  // namespace slarev

#include "slarev/room.hpp"

#include <algorithm>
#include <cmath>

namespace slarev {

void RoomSpec::validate() const {
  if (!(dimensions.minCoeff() > 0.0)) throw DomainError("room dimensions must be positive");
  if (!(absorption > 0.0 && absorption <= 1.0)) throw DomainError("absorption must be in (0, 1]");
  if (!(speed_of_sound > 0.0)) throw DomainError("speed of sound must be positive");
}

double RoomSpec::surface() const {
  const auto& d = dimensions;
  return 2.0 * (d.x() * d.y() + d.x() * d.z() + d.y() * d.z());
}

double RoomSpec::sabine_rt() const { return 0.161 * volume() / (surface() * absorption); }

bool RoomSpec::contains(const Vector3d& p) const {
  return (p.array() > 0.0).all() && (p.array() < dimensions.array()).all();
}

void Placement::validate(const RoomSpec& room) const {
  if (!room.contains(sla_position)) throw DomainError("SLA position outside the room");
  if (!room.contains(sma_position)) throw DomainError("SMA position outside the room");
  if (!(direct_distance() > 0.0)) throw DomainError("SLA and SMA are coincident");
  const Eigen::Matrix3d check = sla_orientation.transpose() * sla_orientation;
  if (!check.isIdentity(1e-9)) throw DomainError("SLA orientation is not orthonormal");
}

Direction mirrored_dor(const Vector3d& to_receiver, const std::array<int, 3>& parity,
                       const Eigen::Matrix3d& orientation) {
  Vector3d d = to_receiver;
  for (int a = 0; a < 3; ++a)
    if (parity[a] & 1) d(a) = -d(a);
  return Direction::from_cartesian(orientation.transpose() * d);
}

ReflectionList image_sources(const RoomSpec& room, const Placement& placement, double max_time) {
  room.validate();
  placement.validate(room);
  const double c = room.speed_of_sound;
  const double direct = placement.direct_distance();
  if (!(max_time * c > direct)) throw DomainError("max_time does not exceed the direct delay");

  const double rmax = max_time * c;
  const double beta = room.reflection_coefficient();
  const Vector3d& src = placement.sla_position;
  const Vector3d& rec = placement.sma_position;
  const Vector3d& L = room.dimensions;

  std::array<int, 3> nmax{};
  for (int a = 0; a < 3; ++a) nmax[a] = static_cast<int>(std::ceil(rmax / (2.0 * L(a)))) + 1;

  ReflectionList out;
  // Image coordinate along an axis: (1 - 2q) s + 2 i L, with |i - q| + |i| wall hits.
  for (int qx = 0; qx <= 1; ++qx)
    for (int qy = 0; qy <= 1; ++qy)
      for (int qz = 0; qz <= 1; ++qz)
        for (int ix = -nmax[0]; ix <= nmax[0]; ++ix) {
          const double dx = (1 - 2 * qx) * src.x() + 2.0 * ix * L.x() - rec.x();
          if (std::abs(dx) > rmax) continue;
          for (int iy = -nmax[1]; iy <= nmax[1]; ++iy) {
            const double dy = (1 - 2 * qy) * src.y() + 2.0 * iy * L.y() - rec.y();
            if (dx * dx + dy * dy > rmax * rmax) continue;
            for (int iz = -nmax[2]; iz <= nmax[2]; ++iz) {
              const double dz = (1 - 2 * qz) * src.z() + 2.0 * iz * L.z() - rec.z();
              const Vector3d from_rec(dx, dy, dz);  // image minus receiver
              const double r = from_rec.norm();
              if (r > rmax) continue;
              Reflection g;
              g.reflection_order = std::abs(ix - qx) + std::abs(ix) + std::abs(iy - qy) +
                                   std::abs(iy) + std::abs(iz - qz) + std::abs(iz);
              g.attenuation = std::pow(beta, g.reflection_order);
              if (g.attenuation == 0.0) continue;
              g.path_length = r;
              g.parity = {qx, qy, qz};
              g.doa = Direction::from_cartesian(from_rec);
              g.dor = mirrored_dor(-from_rec, g.parity, placement.sla_orientation);
              out.push_back(g);
            }
          }
        }

  std::sort(out.begin(), out.end(), [](const Reflection& a, const Reflection& b) {
    if (a.path_length != b.path_length) return a.path_length < b.path_length;
    return a.reflection_order < b.reflection_order;
  });
  return out;
}

}  // namespace slarev

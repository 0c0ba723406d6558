#include "lbkan/plant.hpp"

#include <cmath>
#include <numbers>

namespace lbkan {

Eigen::Vector4d drift(const Eigen::Vector4d& x) noexcept {
  using std::numbers::pi;
  return {
      4.0 * std::tanh(x[0] + std::sin(pi * x[1])),
      5.0 * std::exp(-(x[1] * x[1] + x[2] * x[2])) - 2.0,
      3.0 * std::sin(pi * (x[0] + x[3])) + 2.0 * std::cos(pi * (x[2] + x[1])),
      4.0 / (1.0 + std::exp(-(x[0] - x[1]))) + std::sin(2.0 * x[3]) - 2.0,
  };
}

Eigen::Vector4d disturbance(const PlantSpec& plant, double t) noexcept {
  return Eigen::Vector4d::Constant(plant.disturbance_amplitude *
                                   std::cos(plant.disturbance_frequency * t));
}

DesiredState desired(const Trajectory& traj, double t) noexcept {
  const double phase = traj.b * t + traj.c;
  return {Eigen::Vector4d::Constant(traj.a * std::sin(phase)),
          Eigen::Vector4d::Constant(traj.a * traj.b * std::cos(phase))};
}

double uniform(std::mt19937_64& rng, double lo, double hi) noexcept {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

Scenario sample_scenario(std::mt19937_64& rng) {
  Scenario s;
  for (int i = 0; i < kPlantDim; ++i) s.x0[i] = uniform(rng, -8.0, 8.0);
  s.trajectory.a = uniform(rng, 0.5, 1.5);
  s.trajectory.b = uniform(rng, 0.2, 0.5);
  s.trajectory.c = uniform(rng, 0.0, std::numbers::pi);
  return s;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace lbkan

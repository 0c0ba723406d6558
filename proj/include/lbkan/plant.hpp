#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace lbkan {

constexpr int kPlantDim = 4;

struct Trajectory {
  double a = 1.0;  // amplitude, rad
  double b = 0.3;  // frequency, rad/s
  double c = 0.0;  // phase, rad
};

// The simulated plant x' = f(x) + u + d(t) tracking x_d(t). Nothing outside
// the simulator and the diagnostics reads f.
struct PlantSpec {
  Trajectory trajectory;
  double disturbance_amplitude = 0.1;
  double disturbance_frequency = 0.5;  // rad/s
};

// f(x) for the four-state benchmark system.
Eigen::Vector4d drift(const Eigen::Vector4d& x) noexcept;

// d(t), the same scalar on every channel.
Eigen::Vector4d disturbance(const PlantSpec& plant, double t) noexcept;

struct DesiredState {
  Eigen::Vector4d x_d;
  Eigen::Vector4d xd_dot;
};

// x_d(t) = a sin(bt + c) on every channel, with its time derivative.
DesiredState desired(const Trajectory& traj, double t) noexcept;

// Uniform double in [lo, hi) from the top 53 bits of a 64-bit Mersenne
// twister draw. Unlike std::uniform_real_distribution the mapping is fixed,
// so seeded results match across standard libraries.
double uniform(std::mt19937_64& rng, double lo, double hi) noexcept;

// Randomized initial condition and trajectory for one closed-loop run:
// x(0) ~ U(-8, 8)^4, a ~ U(0.5, 1.5), b ~ U(0.2, 0.5), c ~ U(0, pi).
struct Scenario {
  Eigen::Vector4d x0 = Eigen::Vector4d::Zero();
  Trajectory trajectory;
};

Scenario sample_scenario(std::mt19937_64& rng);

// Independent stream for (base seed, stream index).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace lbkan

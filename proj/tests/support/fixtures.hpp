#pragma once

#include "seismon/ground_motion.hpp"
#include "seismon/structure.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace fixture {

inline seismon::BuildingModel shear_building(std::vector<double> mass, std::vector<double> stiffness,
                                             double height = 3.0) {
  seismon::BuildingModel model;
  model.story_height.assign(mass.size(), height);
  model.story_mass = std::move(mass);
  model.story_stiffness = std::move(stiffness);
  return model;
}

/// Uniform n-story building: 1e5 kg floors, 1e8 N/m stories.
inline seismon::BuildingModel uniform_building(int n, double mass = 1e5, double stiffness = 1e8) {
  return shear_building(std::vector<double>(static_cast<std::size_t>(n), mass),
                        std::vector<double>(static_cast<std::size_t>(n), stiffness));
}

/// Seven stories, first story taller, bilinear everywhere.
inline seismon::BuildingModel seven_story_bilinear() {
  seismon::BuildingModel model;
  model.story_height = {4.11, 2.64, 2.64, 2.64, 2.64, 2.64, 2.64};
  model.story_mass = {6.8e5, 6.3e5, 6.3e5, 6.3e5, 6.3e5, 6.3e5, 5.6e5};
  model.story_stiffness = {9.0e8, 8.4e8, 7.8e8, 7.0e8, 6.2e8, 5.2e8, 4.2e8};
  for (double h : model.story_height) model.hysteresis.push_back(seismon::HysteresisLaw::bilinear(0.004 * h, 0.1));
  return model;
}

inline seismon::Record sine_record(double amplitude, double omega, double dt, std::size_t samples,
                                   seismon::Units units = seismon::Units::acceleration) {
  seismon::Record r;
  r.dt = dt;
  r.units = units;
  r.channel = "sine";
  for (std::size_t i = 0; i < samples; ++i) r.samples.push_back(amplitude * std::sin(omega * dt * static_cast<double>(i)));
  return r;
}

inline seismon::GroundMotionSpec northridge_like(double g0 = 0.01, double duration = 30.0, double dt = 0.01) {
  seismon::GroundMotionSpec spec;
  spec.g0 = g0;
  spec.omega_g = 6.0 * std::numbers::pi;
  spec.xi_g = 0.35;
  spec.alpha = 0.12;
  spec.duration = duration;
  spec.dt = dt;
  return spec;
}

}  // namespace fixture

#pragma once

// Concentric-cylinder geometry of the storage device and the radial
// resistance primitives built on it.
//
// The device is a pipe-in-pipe: working fluid in the core, a metal inner
// wall, the PCM annulus, and an insulated outer wall exposed to ambient air.
// All resistances returned here are in degC/kW (inputs k, h_conv in W-based
// units; the 1e-3 factor lives here and nowhere else).

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tes {

struct TesGeometry {
  double inner_radius = 6.0e-3;          // m, fluid channel radius
  double inner_wall_thickness = 0.8e-3;  // m
  double pcm_thickness = 19.1e-3;        // m
  double outer_wall_thickness = 6.4e-3;  // m
  double length = 1.0;                   // m

  double inner_wall_outer_radius() const { return inner_radius + inner_wall_thickness; }
  double inner_wall_mid_radius() const { return inner_radius + 0.5 * inner_wall_thickness; }
  double pcm_inner_radius() const { return inner_wall_outer_radius(); }
  double pcm_outer_radius() const { return pcm_inner_radius() + pcm_thickness; }
  double outer_wall_mid_radius() const { return pcm_outer_radius() + 0.5 * outer_wall_thickness; }
  double outer_radius() const { return pcm_outer_radius() + outer_wall_thickness; }

  void validate() const {
    auto positive = [](double v, const char* field) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("TesGeometry: ") + field +
                                    " must be positive and finite");
    };
    positive(inner_radius, "inner_radius");
    positive(inner_wall_thickness, "inner_wall_thickness");
    positive(pcm_thickness, "pcm_thickness");
    positive(outer_wall_thickness, "outer_wall_thickness");
    positive(length, "length");
  }
};

inline double cylinder_volume(double r, double length) {
  return std::numbers::pi * r * r * length;
}

inline double annulus_volume(double r_in, double r_out, double length) {
  return std::numbers::pi * (r_out * r_out - r_in * r_in) * length;
}

/// Radius that splits the annulus [r_in, r_out] into two equal volumes.
inline double equal_volume_radius(double r_in, double r_out) {
  return std::sqrt(0.5 * (r_in * r_in + r_out * r_out));
}

/// Conduction resistance of a cylindrical shell, degC/kW (k in W/(m*degC)).
inline double radial_resistance(double r_in, double r_out, double length, double k) {
  if (!(r_out >= r_in) || !(r_in > 0.0))
    throw std::invalid_argument("radial_resistance: requires 0 < r_in <= r_out");
  return std::log(r_out / r_in) / (2.0 * std::numbers::pi * length * k * 1e-3);
}

/// Convective film resistance over the shell face at radius r, degC/kW
/// (h_conv in W/(m^2*degC)).
inline double film_resistance(double r, double length, double h_conv) {
  return 1.0 / (2.0 * std::numbers::pi * r * length * h_conv * 1e-3);
}

}  // namespace tes

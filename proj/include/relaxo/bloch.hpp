#pragma once

// Cartesian Bloch dynamics with dominant transverse relaxation, the reduced
// spherical dynamics, and the coordinate transform connecting them.

#include "relaxo/types.hpp"

namespace relaxo {

// Time derivative of the magnetization in the resonant rotating frame with
// longitudinal relaxation neglected:
//   d(mz)/dt = omega_y*mx - omega_x*my
//   d(mx)/dt = -R*mx - omega_y*mz
//   d(my)/dt = -R*my + omega_x*mz
// Returned in (mx, my, mz) storage order.
Magnetization cartesian_derivative(const Magnetization& m, double omega_x,
                                   double omega_y, double R);

// Change of variables: a = ln(|m|/m0), theta = atan2(|m_perp|, mz) in [0, pi],
// phi = atan2(my, mx). Throws std::domain_error at |m| = 0 (theta undefined).
SphericalCoords to_spherical(const Magnetization& m, double m0);

// Inverse transform: reconstruct the Cartesian vector from (a, theta, phi).
Magnetization from_spherical(const SphericalCoords& s, double m0);

// Reduced dynamics under a perpendicular control omega:
//   da/dt     = -R sin^2(theta)
//   dtheta/dt = omega - R sin(theta) cos(theta)
SphericalRate spherical_derivative(const SphericalState& s, double omega,
                                   double R);

} // namespace relaxo

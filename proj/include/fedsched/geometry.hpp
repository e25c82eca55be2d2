#pragma once

#include <Eigen/Dense>

namespace fedsched {

using Vec3 = Eigen::Vector3d;

inline constexpr double earth_radius_km = 6371.0;
inline constexpr double earth_mu_km3_s2 = 398600.4418;
inline constexpr double sidereal_day_s = 86164.0;
inline constexpr double earth_rotation_deg_s = 360.0 / sidereal_day_s;
inline constexpr double light_speed_km_s = 299792.458;

double deg_to_rad(double deg);
double rad_to_deg(double rad);

/// ECEF position of a ground point on the spherical Earth.
Vec3 site_ecef_km(double latitude_deg, double longitude_deg);

/// Position on a circular orbit (semi-major axis a_km) at epoch_s, in the
/// Earth-fixed frame: Keplerian motion plus Earth rotation at the sidereal
/// rate. phase_deg is the argument of latitude at epoch 0.
Vec3 orbital_position_ecef_km(double a_km, double inclination_deg, double raan_deg,
                              double phase_deg, double epoch_s);

double orbital_period_s(double a_km);

/// Elevation of a satellite above a ground site's local horizon, degrees.
double elevation_deg(const Vec3& sat_ecef_km, const Vec3& site_ecef_km);

/// True when the straight segment between two points clears the Earth sphere.
bool line_of_sight(const Vec3& a, const Vec3& b);

} // namespace fedsched

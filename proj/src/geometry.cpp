#include "fedsched/geometry.hpp"

#include <cmath>
#include <numbers>

namespace fedsched {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

Vec3 site_ecef_km(double latitude_deg, double longitude_deg) {
    const double lat = deg_to_rad(latitude_deg);
    const double lon = deg_to_rad(longitude_deg);
    return earth_radius_km * Vec3(std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
                                  std::sin(lat));
}

double orbital_period_s(double a_km) {
    return 2.0 * std::numbers::pi * std::sqrt(a_km * a_km * a_km / earth_mu_km3_s2);
}

Vec3 orbital_position_ecef_km(double a_km, double inclination_deg, double raan_deg,
                              double phase_deg, double epoch_s) {
    const double mean_motion = std::sqrt(earth_mu_km3_s2 / (a_km * a_km * a_km)); // rad/s
    const double u = deg_to_rad(phase_deg) + mean_motion * epoch_s;               // argument of latitude
    const double raan = deg_to_rad(raan_deg);
    const double inc = deg_to_rad(inclination_deg);

    const double cos_u = std::cos(u), sin_u = std::sin(u);
    const double cos_raan = std::cos(raan), sin_raan = std::sin(raan);
    const double cos_inc = std::cos(inc), sin_inc = std::sin(inc);

    const Vec3 inertial(a_km * (cos_raan * cos_u - sin_raan * sin_u * cos_inc),
                        a_km * (sin_raan * cos_u + cos_raan * sin_u * cos_inc),
                        a_km * (sin_u * sin_inc));

    // Rotate into the Earth-fixed frame.
    const double theta = deg_to_rad(earth_rotation_deg_s) * epoch_s;
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);
    return Vec3(cos_t * inertial.x() + sin_t * inertial.y(),
                -sin_t * inertial.x() + cos_t * inertial.y(), inertial.z());
}

double elevation_deg(const Vec3& sat_ecef_km, const Vec3& site_ecef_km) {
    const Vec3 up = site_ecef_km.normalized();
    const Vec3 to_sat = sat_ecef_km - site_ecef_km;
    const double range = to_sat.norm();
    if (range == 0.0) return 90.0;
    const double sin_el = up.dot(to_sat) / range;
    return rad_to_deg(std::asin(std::clamp(sin_el, -1.0, 1.0)));
}

bool line_of_sight(const Vec3& a, const Vec3& b) {
    // Closest approach of the segment a-b to the Earth's center.
    const Vec3 d = b - a;
    const double dd = d.squaredNorm();
    double t = 0.0;
    if (dd > 0.0) t = std::clamp(-a.dot(d) / dd, 0.0, 1.0);
    const Vec3 closest = a + t * d;
    return closest.norm() > earth_radius_km;
}

} // namespace fedsched

#pragma once

#include <cmath>
#include <complex>

namespace plsm {

using Complex = std::complex<double>;

/// A point (or vector) in the plane, lengths in units of the wavelength scale.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }

    double norm() const { return std::hypot(x, y); }
    double angle() const { return std::atan2(y, x); }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }

inline Point2 polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

}  // namespace plsm

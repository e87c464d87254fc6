#pragma once

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace optcas {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return s * a; }
inline Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a = a + b; return a; }
inline Vec3& operator-=(Vec3& a, const Vec3& b) { a = a - b; return a; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline Vec3 normalized(const Vec3& a) {
    double n = norm(a);
    if (!(n > 0.0)) throw std::invalid_argument("normalized: zero-length vector");
    return a / n;
}

// Unit direction. Construction normalizes; a near-zero input is an error.
class Dir3 {
  public:
    explicit Dir3(const Vec3& v) : v_(normalized(v)) {}
    Dir3(double x, double y, double z) : Dir3(Vec3{x, y, z}) {}

    const Vec3& vec() const { return v_; }
    double x() const { return v_.x; }
    double y() const { return v_.y; }
    double z() const { return v_.z; }

  private:
    Vec3 v_;
};

inline double dot(const Dir3& a, const Vec3& b) { return dot(a.vec(), b); }
inline double dot(const Vec3& a, const Dir3& b) { return dot(a, b.vec()); }
inline double dot(const Dir3& a, const Dir3& b) { return dot(a.vec(), b.vec()); }

// Some vector orthogonal to a (unit length), chosen stably.
inline Vec3 any_orthogonal(const Vec3& a) {
    Vec3 ref = std::fabs(a.x) < 0.9 * norm(a) ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    return normalized(cross(a, ref));
}

}  // namespace optcas

#pragma once

#include <array>
#include <cmath>

namespace shearband {

struct Vec3 {
    double v[3]{0.0, 0.0, 0.0};

    constexpr Vec3() = default;
    constexpr Vec3(double a, double b, double c) : v{a, b, c} {}

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    Vec3& operator+=(const Vec3& o) {
        v[0] += o.v[0];
        v[1] += o.v[1];
        v[2] += o.v[2];
        return *this;
    }
    Vec3& operator-=(const Vec3& o) {
        v[0] -= o.v[0];
        v[1] -= o.v[1];
        v[2] -= o.v[2];
        return *this;
    }
    Vec3& operator*=(double s) {
        v[0] *= s;
        v[1] *= s;
        v[2] *= s;
        return *this;
    }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(const Vec3& a) {
    double s = norm(a);
    return {a[0] / s, a[1] / s, a[2] / s};
}

// Row-major 3x3 matrix, just enough for Jacobians and the eigen-oracle.
struct Mat3 {
    double m[3][3]{};

    double* operator[](int i) { return m[i]; }
    const double* operator[](int i) const { return m[i]; }
};

inline Vec3 operator*(const Mat3& A, const Vec3& x) {
    Vec3 y;
    for (int i = 0; i < 3; ++i)
        y[i] = A[i][0] * x[0] + A[i][1] * x[1] + A[i][2] * x[2];
    return y;
}

} // namespace shearband

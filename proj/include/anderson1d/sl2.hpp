#pragma once

#include <array>
#include <cmath>

namespace anderson {

// Real 2x2 matrix [[a, b], [c, d]], used as an SL(2,R) element.
struct Sl2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    static Sl2 identity() { return {}; }
    static Sl2 rotation(double alpha) {
        const double co = std::cos(alpha), si = std::sin(alpha);
        return {co, -si, si, co};
    }
    static Sl2 diag(double x, double y) { return {x, 0.0, 0.0, y}; }

    Sl2 operator*(const Sl2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    std::array<double, 2> apply(double x, double y) const { return {a * x + b * y, c * x + d * y}; }

    Sl2 transpose() const { return {a, c, b, d}; }

    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
    }

    double frob_sq() const { return a * a + b * b + c * c + d * d; }

    // a*d - b*c with an fma correction, accurate under heavy cancellation.
    double det() const {
        const double w = b * c;
        const double err = std::fma(b, c, -w);
        const double f = std::fma(a, d, -w);
        return f - err;
    }

    // Spectral norm, exact for 2x2: sigma1^2 = (F + sqrt(F^2 - 4 det^2))/2.
    double norm2() const {
        const double f = frob_sq();
        const double dt = det();
        const double disc = std::max(0.0, f * f - 4.0 * dt * dt);
        return std::sqrt(0.5 * (f + std::sqrt(disc)));
    }
};

// One-step transfer matrix of the eigenvalue equation at energy E.
inline Sl2 step_matrix(double E, double v) { return {E - v, -1.0, 1.0, 0.0}; }

// Singular structure of a 2x2 matrix: angles of the right-singular directions.
// theta_min is the most contracted input direction (smallest singular value).
struct Svd2 {
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    double theta_max = 0.0;  // in [0, pi)
    double theta_min = 0.0;  // in [0, pi)
};

inline double wrap_angle_pi(double t) {
    t = std::fmod(t, std::acos(-1.0));
    if (t < 0) t += std::acos(-1.0);
    return t;
}

inline Svd2 svd2(const Sl2& m) {
    // Eigen-decomposition of M^T M, closed form.
    const double p = m.a * m.a + m.c * m.c;
    const double q = m.a * m.b + m.c * m.d;
    const double r = m.b * m.b + m.d * m.d;
    const double tr = p + r;
    const double disc = std::sqrt(std::max(0.0, (p - r) * (p - r) + 4.0 * q * q));
    Svd2 s;
    s.sigma_max = std::sqrt(std::max(0.0, 0.5 * (tr + disc)));
    s.sigma_min = std::sqrt(std::max(0.0, 0.5 * (tr - disc)));
    const double pi = std::acos(-1.0);
    const double theta_big = 0.5 * std::atan2(2.0 * q, p - r);  // eigenvector of the larger eigenvalue
    s.theta_max = wrap_angle_pi(theta_big);
    s.theta_min = wrap_angle_pi(theta_big + 0.5 * pi);
    return s;
}

}  // namespace anderson

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "parammp/error.hpp"

namespace parammp {

/// A point or vector of R^d; the dimension is carried at runtime.
using Point = std::vector<double>;

inline void require_same_dim(const Point& a, const Point& b) {
    if (a.size() != b.size()) fail(ErrorKind::DimensionMismatch, "points have different dimensions");
}

inline double dot(const Point& a, const Point& b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm(const Point& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

inline Point add(const Point& a, const Point& b) {
    require_same_dim(a, b);
    Point r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] + b[k];
    return r;
}

inline Point sub(const Point& a, const Point& b) {
    require_same_dim(a, b);
    Point r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
    return r;
}

inline Point scaled(const Point& a, double s) {
    Point r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] * s;
    return r;
}

/// a + s * b
inline Point axpy(const Point& a, double s, const Point& b) {
    require_same_dim(a, b);
    Point r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] + s * b[k];
    return r;
}

inline double distance(const Point& a, const Point& b) { return norm(sub(a, b)); }

/// (1 - u) * a + u * b
inline Point lerp(const Point& a, const Point& b, double u) {
    require_same_dim(a, b);
    Point r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] + u * (b[k] - a[k]);
    return r;
}

inline Point axis(std::size_t dim, std::size_t k) {
    Point r(dim, 0.0);
    r[k] = 1.0;
    return r;
}

}  // namespace parammp

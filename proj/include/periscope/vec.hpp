#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "periscope/errors.hpp"

namespace periscope {

/// Dense Euclidean vector with runtime dimension. Doubles throughout;
/// ambient points, sphere directions and chart coordinates all use this type.
class Vec {
  public:
    Vec() = default;
    explicit Vec(std::size_t n) : c_(n, 0.0) {}
    Vec(std::initializer_list<double> xs) : c_(xs) {}
    explicit Vec(std::vector<double> xs) : c_(std::move(xs)) {}

    static Vec zero(std::size_t n) { return Vec(n); }
    /// Standard basis vector e_i in dimension n.
    static Vec unit(std::size_t n, std::size_t i) {
        Vec v(n);
        v.c_[i] = 1.0;
        return v;
    }

    std::size_t dim() const { return c_.size(); }
    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }
    const std::vector<double>& components() const { return c_; }

    Vec& operator+=(const Vec& r) {
        check_dim(r);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += r.c_[i];
        return *this;
    }
    Vec& operator-=(const Vec& r) {
        check_dim(r);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= r.c_[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (double& x : c_) x *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator-(Vec a) {
        for (double& x : a.c_) x = -x;
        return a;
    }

    friend bool operator==(const Vec& a, const Vec& b) { return a.c_ == b.c_; }

    double dot(const Vec& r) const {
        check_dim(r);
        double s = 0.0;
        for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] * r.c_[i];
        return s;
    }

    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }

    /// Unit vector in the same direction; throws on norms below eps.
    Vec normalized(double eps = 1e-14) const {
        double n = norm();
        if (n <= eps)
            throw Error(ErrorCode::degenerate_normal, "cannot normalize near-zero vector");
        Vec v = *this;
        v *= 1.0 / n;
        return v;
    }

    bool all_finite() const {
        for (double x : c_)
            if (!std::isfinite(x)) return false;
        return true;
    }

  private:
    void check_dim(const Vec& r) const {
        if (r.c_.size() != c_.size())
            throw Error(ErrorCode::dimension_mismatch, "vector dimensions differ");
    }

    std::vector<double> c_;
};

inline double dot(const Vec& a, const Vec& b) { return a.dot(b); }
inline double norm(const Vec& v) { return v.norm(); }
inline double distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

/// Cross product, 3-dimensional vectors only.
inline Vec cross(const Vec& a, const Vec& b) {
    if (a.dim() != 3 || b.dim() != 3)
        throw Error(ErrorCode::dimension_mismatch, "cross product requires dimension 3");
    return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

} // namespace periscope

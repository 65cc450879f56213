#include "periscope/geometry.hpp"

#include <cmath>

namespace periscope {

Vec reflect_direction(const Vec& d, const Vec& normal) {
    double nn = normal.norm();
    if (nn < 1e-14)
        throw Error(ErrorCode::degenerate_normal, "reflection normal has near-zero norm");
    Vec n = (1.0 / nn) * normal;
    return d - (2.0 * d.dot(n)) * n;
}

Vec tangential_gradient(const ScalarField& field, const Vec& x) {
    Vec g = field.gradient(x);
    return g - g.dot(x) * x;
}

Vec sphere_exp(const Vec& x, const Vec& v, double t) {
    return std::cos(t) * x + std::sin(t) * v;
}

Vec geodesic_direction(const Vec& x, const Vec& y) {
    if ((y + x).norm() <= 1e-9)
        throw Error(ErrorCode::non_unique_geodesic, "antipodal endpoints");
    if ((y - x).norm() <= 1e-9)
        throw Error(ErrorCode::zero_distance, "coincident endpoints");
    // Component of y orthogonal to x; |y - (x.y) x| = sin d(x,y) > 0 here.
    Vec u = y - x.dot(y) * x;
    return u.normalized();
}

std::vector<Vec> tangent_basis(const Vec& x) {
    const std::size_t n = x.dim();
    std::vector<Vec> basis;
    for (std::size_t i = 0; i < n && basis.size() < n - 1; ++i) {
        Vec e = Vec::unit(n, i);
        e -= e.dot(x) * x;
        for (const Vec& b : basis) e -= e.dot(b) * b;
        double nrm = e.norm();
        if (nrm > 1e-8) basis.push_back((1.0 / nrm) * e);
    }
    if (basis.size() != n - 1)
        throw Error(ErrorCode::degenerate_normal, "could not build a tangent basis");
    return basis;
}

namespace {

double surface_value(const ImplicitSurface& surface, const Ray& ray, double t) {
    return surface.value(ray.at(t));
}

double surface_slope(const ImplicitSurface& surface, const Ray& ray, double t) {
    if (surface.gradient) return surface.gradient(ray.at(t)).dot(ray.direction);
    const double h = 1e-7;
    return (surface_value(surface, ray, t + h) - surface_value(surface, ray, t - h)) / (2.0 * h);
}

} // namespace

RayHit ray_surface_intersect(const Ray& ray, const ImplicitSurface& surface, double t_lo,
                             double t_hi) {
    double s_lo = surface_value(surface, ray, t_lo);
    double s_hi = surface_value(surface, ray, t_hi);
    auto converged = [](double s, double t) { return std::abs(s) <= 1e-12 * (1.0 + std::abs(t)); };
    if (converged(s_lo, t_lo)) return {t_lo, ray.at(t_lo)};
    if (converged(s_hi, t_hi)) return {t_hi, ray.at(t_hi)};
    if (s_lo * s_hi > 0.0) {
        // Endpoints agree in sign; scan for the first interior sign change
        // (a ray can enter and leave the surface within the bracket).
        const int slices = 128;
        double step = (t_hi - t_lo) / slices;
        double t_prev = t_lo;
        double s_prev = s_lo;
        bool found = false;
        for (int i = 1; i <= slices; ++i) {
            double t = t_lo + i * step;
            double s = surface_value(surface, ray, t);
            if (converged(s, t)) return {t, ray.at(t)};
            if (s_prev * s <= 0.0) {
                t_hi = t;
                s_hi = s;
                t_lo = t_prev;
                s_lo = s_prev;
                found = true;
                break;
            }
            t_prev = t;
            s_prev = s;
        }
        if (!found) throw Error(ErrorCode::no_intersection, "no sign change on the bracket");
    }

    // Bisection down to a 1e-6 bracket, then safeguarded Newton.
    while (t_hi - t_lo > 1e-6) {
        double t_mid = 0.5 * (t_lo + t_hi);
        double s_mid = surface_value(surface, ray, t_mid);
        if (converged(s_mid, t_mid)) return {t_mid, ray.at(t_mid)};
        if (s_lo * s_mid <= 0.0) {
            t_hi = t_mid;
            s_hi = s_mid;
        } else {
            t_lo = t_mid;
            s_lo = s_mid;
        }
    }

    double t = 0.5 * (t_lo + t_hi);
    for (int iter = 0; iter < 100; ++iter) {
        double s = surface_value(surface, ray, t);
        if (converged(s, t)) return {t, ray.at(t)};
        double slope = surface_slope(surface, ray, t);
        double t_next = (slope != 0.0) ? t - s / slope : t_lo - 1.0;
        if (!(t_next >= t_lo && t_next <= t_hi)) t_next = 0.5 * (t_lo + t_hi);
        // Keep the sign-change bracket valid while Newton runs.
        if (s_lo * s <= 0.0) {
            t_hi = t;
            s_hi = s;
        } else {
            t_lo = t;
            s_lo = s;
        }
        t = t_next;
    }
    throw Error(ErrorCode::no_convergence, "root polish did not converge in 100 iterations");
}

} // namespace periscope

#pragma once

#include <functional>

#include "periscope/ray.hpp"
#include "periscope/scalar_field.hpp"
#include "periscope/vec.hpp"

namespace periscope {

/// Mirror reflection of a unit direction d in the hyperplane orthogonal to N:
/// d - 2 (d . n) n with n = N / |N|. Angle of incidence equals angle of
/// reflection; |N| below 1e-14 is rejected as degenerate.
Vec reflect_direction(const Vec& d, const Vec& normal);

/// Gradient of an ambient field restricted to the unit sphere: the tangential
/// projection grad F - (x . grad F) x, so the result satisfies result . x = 0.
Vec tangential_gradient(const ScalarField& field, const Vec& x);

/// Point reached after walking angle t along the great circle from x in unit
/// tangent direction v: cos(t) x + sin(t) v.
Vec sphere_exp(const Vec& x, const Vec& v, double t);

/// Unit tangent at x of the shortest great-circle arc from x to y. Undefined
/// for y antipodal to x (non-unique geodesic) and for y = x (zero distance).
Vec geodesic_direction(const Vec& x, const Vec& y);

/// Orthonormal basis of the hyperplane orthogonal to unit x (n-1 vectors),
/// by Gram-Schmidt over the standard basis. Deterministic for a given x.
std::vector<Vec> tangent_basis(const Vec& x);

/// Implicit surface s(p) = 0 with an optional analytic gradient; when the
/// gradient is absent, Newton steps fall back to finite differences.
struct ImplicitSurface {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient; // may be empty
};

struct RayHit {
    double t = 0.0;
    Vec point;
};

/// First root of s(origin + t dir) = 0 on [t_lo, t_hi]. Requires a sign
/// change on the bracket; when the endpoints agree in sign the bracket is
/// scanned for the first interior crossing. Bisection narrows to width 1e-6,
/// then Newton polishes to |s| <= 1e-12 (1 + |t|), safeguarded against
/// leaving the bracket. Fails after 100 Newton iterations.
RayHit ray_surface_intersect(const Ray& ray, const ImplicitSurface& surface, double t_lo,
                             double t_hi);

} // namespace periscope

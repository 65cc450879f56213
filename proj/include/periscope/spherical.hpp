#pragma once

#include "periscope/scalar_field.hpp"
#include "periscope/vec.hpp"

namespace periscope::spherical {

/// Geodesic cap on the unit sphere: directions within `radius` radians of
/// `base`. Grids over the patch use the exponential chart at `base`,
/// restricted to the axis-aligned box inscribed in the cap.
struct Patch {
    Vec base;
    double radius = 0.0;

    bool contains(const Vec& x, double tol = 1e-12) const;

    /// Exponential-chart point: coordinates u (in the tangent frame at base,
    /// |u| = angle) mapped onto the sphere. Half-width radius/sqrt(n-1) boxes
    /// stay inside the cap.
    Vec chart_point(const Vec& u) const;
};

/// Two-mirror system returning every ray from the origin back to the origin.
/// The first mirror is P(x) = e^{f(x)} x over sphere directions x; 2C is the
/// constant perimeter of the triangle O P Q. Construction samples the patch
/// (grid_samples per chart axis) and rejects specs violating e^f < C or the
/// synthesis denominator C (1 + |grad f|^2) - e^f > 0, with margin 1e-9.
class Spec {
  public:
    Spec(ScalarField f, double path_constant, Patch patch, std::size_t grid_samples = 33);

    const ScalarField& f() const { return f_; }
    double C() const { return C_; }
    const Patch& patch() const { return patch_; }
    std::size_t dim() const { return f_.dim(); }

  private:
    ScalarField f_;
    double C_;
    Patch patch_;
};

/// Everything the closed-form synthesis yields at one direction x: the mapped
/// direction y = T(x), radial distances e^f and e^g of the impact points,
/// tangential gradients at x and y, the mirror tilt angles, the shared value
/// S = e^f |grad f| / (1 + |grad f|^2), and the spherical distance d(x, y).
///
/// When grad f vanishes the ray retroreflects through the origin: y = -x is
/// reported with `antipodal` set, grad_g is the zero vector, and operations
/// needing the geodesic direction to y refuse to run.
struct Synthesis {
    Vec x;
    Vec y;
    double e_f = 0.0;
    double e_g = 0.0;
    Vec grad_f;
    Vec grad_g;
    double grad_f_mag = 0.0;
    double grad_g_mag = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double S = 0.0;
    double d = 0.0;
    bool antipodal = false;
};

/// Closed-form synthesis at direction x (must lie in the patch).
Synthesis synthesize(const Spec& spec, const Vec& x);

/// First-mirror impact point P(x) = e^{f(x)} x.
Vec mirror_point(const Spec& spec, const Vec& x);

/// First-mirror normal N_x = x - grad f(x) (tangential gradient).
Vec mirror_normal(const Spec& spec, const Vec& x);

/// |grad g| at y = T(x): e^f |grad f| / (C (1 + |grad f|^2) - e^f).
double grad_g_magnitude(const Spec& spec, const Vec& x);

/// Second-mirror radial distance e^{g(T(x))}:
/// (e^{2f} - 2 C e^f + C^2 (1 + |grad f|^2)) / (C (1 + |grad f|^2) - e^f).
double second_radius(const Spec& spec, const Vec& x);

/// Spherical distance d(x, T(x)) =
/// pi - 2 asin( C |grad f| / sqrt(e^{2f} - 2 C e^f + C^2 (1 + |grad f|^2)) ).
/// The radicand equals (C - e^f)^2 + C^2 |grad f|^2, so the asin argument
/// stays in [0, 1].
double geodesic_distance(const Spec& spec, const Vec& x);

/// Front map T: walks distance d from x along grad f / |grad f|. Returns the
/// full synthesis; callers needing only y read `.y`. With |grad f| < 1e-12
/// the result is -x with the antipodal flag set.
Synthesis periscope_map(const Spec& spec, const Vec& x);

/// Tangential gradient of g at y = T(x): magnitude grad_g_magnitude, directed
/// along the geodesic from y back toward x. Reflecting the ray P->Q in
/// N_y = y - grad g(y) then sends it through the origin. Zero vector in the
/// antipodal case.
Vec second_mirror_gradient(const Spec& spec, const Vec& x);

/// Unit tangent V_T(x) toward T(x); parallel to grad f(x). Errors on
/// antipodal configurations, where the geodesic is not unique.
Vec map_field(const Spec& spec, const Vec& x);

} // namespace periscope::spherical

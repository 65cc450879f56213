#pragma once

#include <optional>

#include "periscope/scalar_field.hpp"
#include "periscope/vec.hpp"

namespace periscope::reversed {

/// Axis-aligned box in the horizontal chart R^{n-1}.
struct Box {
    Vec min;
    Vec max;

    bool contains(const Vec& x, double tol = 1e-12) const;
};

/// Two-mirror system sending every upward vertical ray to a downward one.
/// "Up" is the last ambient coordinate; the mirrors are graphs of f (upper)
/// and g (lower) over the horizontal chart, and 2C is the constant optical
/// path length f + g + |PQ|.
///
/// Construction samples the domain box (grid_samples per axis) and rejects
/// specs violating 0 < |grad f| < 1 or C > f, with margin 1e-9: a horizontal
/// slope retroreflects the vertical ray, slope 1 sends it sideways, and the
/// formulas divide by |grad f|^2.
class Spec {
  public:
    Spec(ScalarField f, double path_constant, Box domain, std::size_t grid_samples = 33);

    const ScalarField& f() const { return f_; }
    double C() const { return C_; }
    const Box& domain() const { return domain_; }
    /// Chart dimension n-1.
    std::size_t chart_dim() const { return f_.dim(); }

  private:
    ScalarField f_;
    double C_;
    Box domain_;
};

/// Synthesis at one chart point x: the mapped point y = T(x), mirror heights,
/// displacement U = y - x, first-mirror tilt angle, and the optical path.
struct Synthesis {
    Vec x;
    Vec y;
    double f_val = 0.0;
    double g_val = 0.0;
    Vec displacement;
    Vec grad_f;
    double grad_f_mag = 0.0;
    double alpha = 0.0;
    double path_length = 0.0;
};

Synthesis synthesize(const Spec& spec, const Vec& x);

/// Height of the second mirror under the mapped point:
/// g = (f - C (1 - |grad f|^2)) / |grad f|^2, evaluated at y = T(x).
double second_height(const Spec& spec, const Vec& x);

/// Horizontal displacement U(x) = 2 (C - f) / |grad f|^2 * grad f; a positive
/// multiple of grad f, with |U| = 2 (f - g) |grad f| / (1 - |grad f|^2).
Vec displacement(const Spec& spec, const Vec& x);

/// Front map T(x) = x + U(x).
Vec periscope_map(const Spec& spec, const Vec& x);

/// Gradient of the second height field at y = T(x): magnitude 1 / |grad f|,
/// pointing along -grad f. With that sign, reflecting the descending ray
/// P->Q in N_y = (-grad g, 1) yields exactly vertical-down.
Vec second_gradient(const Spec& spec, const Vec& x);

/// Second-mirror height as a field on the y side: solves T(x*) = y by Newton
/// iteration (finite-difference Jacobian) and returns second_height at x*.
/// `seed` warm-starts the solve; sweeps pass the previous solution. Fails
/// when Newton stalls (inverse_map) or when the solution leaves the domain
/// box (outside_domain).
double second_height_at(const Spec& spec, const Vec& y, std::optional<Vec> seed = std::nullopt);

} // namespace periscope::reversed

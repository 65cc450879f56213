#include "periscope/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "periscope/geometry.hpp"
#include "periscope/grid.hpp"

namespace periscope::spherical {

namespace {

constexpr double kFeasibilityMargin = 1e-9;
constexpr double kGradientFloor = 1e-12;

} // namespace

bool Patch::contains(const Vec& x, double tol) const {
    double c = std::clamp(x.dot(base), -1.0, 1.0);
    return std::acos(c) <= radius + tol;
}

Vec Patch::chart_point(const Vec& u) const {
    if (u.dim() != base.dim() - 1)
        throw Error(ErrorCode::dimension_mismatch, "chart coordinates have dimension n - 1");
    double angle = u.norm();
    if (angle == 0.0) return base;
    std::vector<Vec> frame = tangent_basis(base);
    Vec v = Vec::zero(base.dim());
    for (std::size_t i = 0; i < frame.size(); ++i) v += u[i] * frame[i];
    return sphere_exp(base, (1.0 / angle) * v, angle);
}

Spec::Spec(ScalarField f, double path_constant, Patch patch, std::size_t grid_samples)
    : f_(std::move(f)), C_(path_constant), patch_(std::move(patch)) {
    if (f_.dim() < 2)
        throw Error(ErrorCode::invalid_argument, "ambient dimension must be at least 2");
    if (!(C_ > 0.0)) throw Error(ErrorCode::invalid_argument, "path constant C must be positive");
    if (patch_.base.dim() != f_.dim())
        throw Error(ErrorCode::dimension_mismatch, "patch base dimension must match the field");
    if (!(patch_.radius > 0.0) || patch_.radius >= std::numbers::pi / 2.0)
        throw Error(ErrorCode::invalid_argument, "patch radius must lie in (0, pi/2)");
    patch_.base = patch_.base.normalized();
    if (grid_samples < 1) grid_samples = 1;

    // Fail fast: e^f < C and a positive synthesis denominator over a sample
    // grid of the patch chart.
    std::size_t axes = f_.dim() - 1;
    double half_width = patch_.radius / std::sqrt(static_cast<double>(axes));
    BoxGrid grid = centered_grid(half_width, std::vector<std::size_t>(axes, grid_samples));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Vec x = patch_.chart_point(grid.point(k));
        double ef = std::exp(f_(x));
        if (!(C_ - ef > kFeasibilityMargin))
            throw Error(ErrorCode::infeasible_configuration,
                        "e^f < C violated on the patch (e^f = " + std::to_string(ef) +
                            ", C = " + std::to_string(C_) + ")");
        double g2 = tangential_gradient(f_, x).squared_norm();
        if (!(C_ * (1.0 + g2) - ef > kFeasibilityMargin))
            throw Error(ErrorCode::infeasible_configuration,
                        "C (1 + |grad f|^2) - e^f must stay positive on the patch");
    }
}

Synthesis synthesize(const Spec& spec, const Vec& x) {
    if (x.dim() != spec.dim())
        throw Error(ErrorCode::dimension_mismatch, "direction dimension mismatch");
    if (!spec.patch().contains(x))
        throw Error(ErrorCode::outside_patch, "direction outside the spec patch");

    const double C = spec.C();
    Synthesis s;
    s.x = x;
    double f = spec.f()(x);
    s.e_f = std::exp(f);
    s.grad_f = tangential_gradient(spec.f(), x);
    s.grad_f_mag = s.grad_f.norm();
    const double g2 = s.grad_f_mag * s.grad_f_mag;

    double denom = C * (1.0 + g2) - s.e_f;
    if (denom <= 1e-12)
        throw Error(ErrorCode::infeasible_configuration,
                    "synthesis denominator C (1 + |grad f|^2) - e^f is not positive");

    // Radicand e^{2f} - 2C e^f + C^2 (1 + |grad f|^2) = (C - e^f)^2 + C^2 |grad f|^2.
    double radicand = s.e_f * s.e_f - 2.0 * C * s.e_f + C * C * (1.0 + g2);
    if (radicand <= 0.0)
        throw Error(ErrorCode::degenerate_geometry,
                    "degenerate configuration: C = e^f with vanishing gradient");

    s.grad_g_mag = s.e_f * s.grad_f_mag / denom;
    s.e_g = radicand / denom;
    double asin_arg = std::min(C * s.grad_f_mag / std::sqrt(radicand), 1.0);
    s.d = std::numbers::pi - 2.0 * std::asin(asin_arg);
    s.alpha = std::atan(s.grad_f_mag);
    s.beta = std::atan(s.grad_g_mag);
    s.S = s.e_f * s.grad_f_mag / (1.0 + g2);

    s.antipodal = s.grad_f_mag < kGradientFloor;
    if (s.antipodal) {
        s.y = -x;
        s.grad_g = Vec::zero(x.dim());
    } else {
        s.y = sphere_exp(x, (1.0 / s.grad_f_mag) * s.grad_f, s.d);
        // Tangent at y toward x, computed inline: for y near -x the public
        // geodesic guard would refuse, but here |grad g| shrinks with the
        // same small angle, so the product stays well conditioned.
        Vec toward_x = x - x.dot(s.y) * s.y;
        double chord = toward_x.norm();
        s.grad_g = chord > 0.0 ? (s.grad_g_mag / chord) * toward_x : Vec::zero(x.dim());
    }
    return s;
}

Vec mirror_point(const Spec& spec, const Vec& x) {
    if (!spec.patch().contains(x))
        throw Error(ErrorCode::outside_patch, "direction outside the spec patch");
    return std::exp(spec.f()(x)) * x;
}

Vec mirror_normal(const Spec& spec, const Vec& x) {
    return x - tangential_gradient(spec.f(), x);
}

double grad_g_magnitude(const Spec& spec, const Vec& x) {
    return synthesize(spec, x).grad_g_mag;
}

double second_radius(const Spec& spec, const Vec& x) { return synthesize(spec, x).e_g; }

double geodesic_distance(const Spec& spec, const Vec& x) { return synthesize(spec, x).d; }

Synthesis periscope_map(const Spec& spec, const Vec& x) { return synthesize(spec, x); }

Vec second_mirror_gradient(const Spec& spec, const Vec& x) { return synthesize(spec, x).grad_g; }

Vec map_field(const Spec& spec, const Vec& x) {
    Synthesis s = synthesize(spec, x);
    if (s.antipodal)
        throw Error(ErrorCode::non_unique_geodesic,
                    "V_T undefined: the front map sends x to its antipode");
    return geodesic_direction(s.x, s.y);
}

} // namespace periscope::spherical

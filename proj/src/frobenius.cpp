#include "periscope/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "periscope/geometry.hpp"

namespace periscope {

namespace {

/// partials[i][j] = d V_j / d p_i by central differences at step h.
void field_partials(const VectorField3& field, const Vec& p, double h, double partials[3][3]) {
    for (std::size_t i = 0; i < 3; ++i) {
        Vec lo = p;
        Vec hi = p;
        lo[i] -= h;
        hi[i] += h;
        Vec v_lo = field(lo);
        Vec v_hi = field(hi);
        if (!v_lo.all_finite() || !v_hi.all_finite())
            throw Error(ErrorCode::invalid_argument, "vector field returned non-finite values");
        for (std::size_t j = 0; j < 3; ++j) partials[i][j] = (v_hi[j] - v_lo[j]) / (2.0 * h);
    }
}

double defect_from_partials(const Vec& value, const double partials[3][3]) {
    // (alpha ^ d alpha)(e1, e2, e3) = V . curl V.
    double curl0 = partials[1][2] - partials[2][1];
    double curl1 = partials[2][0] - partials[0][2];
    double curl2 = partials[0][1] - partials[1][0];
    return value[0] * curl0 + value[1] * curl1 + value[2] * curl2;
}

void check_chart_point(const Vec& p, double h) {
    if (p.dim() != 3)
        throw Error(ErrorCode::dimension_mismatch, "Frobenius defect requires a 3-dimensional chart");
    if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "step must be positive");
}

} // namespace

double dual_one_form(const VectorField3& field, const Vec& p, const Vec& v) {
    return field(p).dot(v);
}

double frobenius_defect(const VectorField3& field, const Vec& p, double h) {
    check_chart_point(p, h);
    Vec value = field(p);
    if (!value.all_finite())
        throw Error(ErrorCode::invalid_argument, "vector field returned non-finite values");
    double partials[3][3];
    field_partials(field, p, h, partials);
    return defect_from_partials(value, partials);
}

FrobeniusReport frobenius_report(const VectorField3& field, const Vec& p, double h) {
    check_chart_point(p, h);
    Vec value = field(p);
    if (!value.all_finite())
        throw Error(ErrorCode::invalid_argument, "vector field returned non-finite values");
    double partials[3][3];
    field_partials(field, p, h, partials);

    FrobeniusReport report;
    report.point = p;
    report.defect = defect_from_partials(value, partials);
    double d_alpha_max = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            d_alpha_max = std::max(d_alpha_max, std::abs(partials[i][j] - partials[j][i]));
    report.scale_invariant_defect = report.defect / (value.norm() * d_alpha_max + 1e-300);
    return report;
}

VectorField3 contact_field() {
    VectorField3 field;
    field.provenance = FieldProvenance::analytic;
    field.eval = [](const Vec& p) { return Vec{p[1], 0.0, 1.0}; };
    return field;
}

GnomonicChart::GnomonicChart(Vec base, double radius) : base_(base.normalized()), radius_(radius) {
    if (base_.dim() < 2)
        throw Error(ErrorCode::invalid_argument, "chart base must be an ambient direction");
    if (!(radius_ > 0.0))
        throw Error(ErrorCode::invalid_argument, "chart radius must be positive");
    basis_ = tangent_basis(base_);
    if (max_angle() >= std::numbers::pi / 2.0)
        throw Error(ErrorCode::invalid_argument, "gnomonic chart box reaches the equator");
}

double GnomonicChart::max_angle() const {
    // Box corner |u| = radius * sqrt(k); gnomonic angle = atan |u|.
    return std::atan(radius_ * std::sqrt(static_cast<double>(chart_dim())));
}

Vec GnomonicChart::to_sphere(const Vec& u) const {
    if (u.dim() != chart_dim())
        throw Error(ErrorCode::dimension_mismatch, "chart coordinate dimension mismatch");
    Vec q = base_;
    for (std::size_t i = 0; i < basis_.size(); ++i) q += u[i] * basis_[i];
    return q.normalized();
}

Vec GnomonicChart::pull_back_form(const Vec& u, const Vec& tangent) const {
    Vec q = base_;
    for (std::size_t i = 0; i < basis_.size(); ++i) q += u[i] * basis_[i];
    double scale = 1.0 / q.norm();
    Vec w(chart_dim());
    for (std::size_t i = 0; i < basis_.size(); ++i) w[i] = tangent.dot(basis_[i]) * scale;
    return w;
}

VectorField3 periscope_field_pullback(const spherical::Spec& spec, const GnomonicChart& chart) {
    if (spec.dim() != 4)
        throw Error(ErrorCode::dimension_mismatch,
                    "pullback chart is 3-dimensional: the spec must live on S^3");
    if (chart.base().dim() != 4)
        throw Error(ErrorCode::dimension_mismatch, "chart base must be a direction on S^3");
    if (!spec.patch().contains(chart.base()) ||
        std::acos(std::clamp(chart.base().dot(spec.patch().base), -1.0, 1.0)) + chart.max_angle() >
            spec.patch().radius)
        throw Error(ErrorCode::outside_patch, "chart box must stay inside the spec patch");

    // Probe the center: a vanishing gradient there means V_T is undefined.
    spherical::map_field(spec, chart.base());

    VectorField3 field;
    field.provenance = FieldProvenance::periscope_pullback;
    field.eval = [spec, chart](const Vec& u) {
        Vec x = chart.to_sphere(u);
        Vec v = spherical::map_field(spec, x);
        return chart.pull_back_form(u, v);
    };
    return field;
}

VectorField3 reversed_displacement_field(const reversed::Spec& spec) {
    if (spec.chart_dim() != 3)
        throw Error(ErrorCode::dimension_mismatch,
                    "displacement field needs a 3-dimensional chart");
    VectorField3 field;
    field.provenance = FieldProvenance::periscope_pullback;
    field.eval = [spec](const Vec& u) { return reversed::displacement(spec, u); };
    return field;
}

} // namespace periscope

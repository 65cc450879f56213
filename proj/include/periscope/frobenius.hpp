#pragma once

#include <functional>
#include <vector>

#include "periscope/reversed.hpp"
#include "periscope/spherical.hpp"
#include "periscope/vec.hpp"

namespace periscope {

enum class FieldProvenance { analytic, periscope_pullback };

/// Vector field on a 3-dimensional chart.
struct VectorField3 {
    std::function<Vec(const Vec&)> eval;
    FieldProvenance provenance = FieldProvenance::analytic;

    Vec operator()(const Vec& p) const { return eval(p); }
};

/// Value of the dual 1-form of V at p on the test vector v (Euclidean
/// metric): V(p) . v.
double dual_one_form(const VectorField3& field, const Vec& p, const Vec& v);

/// alpha ^ d(alpha) evaluated on the standard frame (e1, e2, e3), with the
/// exterior derivative taken by central differences at step h. Equals
/// V . curl V; identically zero iff the distribution orthogonal to V is
/// integrable, i.e. iff V is projectively gradient.
double frobenius_defect(const VectorField3& field, const Vec& p, double h);

struct FrobeniusReport {
    Vec point;
    double defect = 0.0;
    /// defect / (|V| * max |d(alpha)_ij| + 1e-300); dimensionless.
    double scale_invariant_defect = 0.0;
};

FrobeniusReport frobenius_report(const VectorField3& field, const Vec& p, double h);

/// The classic contact field y d/dx + d/dz, whose defect is -1
/// everywhere.
VectorField3 contact_field();

/// Gnomonic (central projection) chart of the unit sphere around `base`:
/// u in R^{n-1} maps to (base + E u) / |base + E u| with E an orthonormal
/// basis of the tangent space at base. Straight lines through the chart
/// origin are geodesics; the chart is singular only at angle pi/2.
class GnomonicChart {
  public:
    GnomonicChart(Vec base, double radius);

    Vec to_sphere(const Vec& u) const;
    /// Chart components of the dual 1-form of a tangent field at to_sphere(u),
    /// i.e. the pullback covector identified with a chart vector by the flat
    /// metric. For tangent t: E^T t / |base + E u|.
    Vec pull_back_form(const Vec& u, const Vec& tangent) const;

    const Vec& base() const { return base_; }
    double radius() const { return radius_; }
    std::size_t chart_dim() const { return base_.dim() - 1; }
    /// Largest sphere angle reached by the chart box [-radius, radius]^k.
    double max_angle() const;

  private:
    Vec base_;
    double radius_;
    std::vector<Vec> basis_; // orthonormal tangent frame at base
};

/// V_T of a spherical periscope on S^3 (ambient dimension 4), carried to the
/// 3-dimensional gnomonic chart as the flat-dual of its pulled-back 1-form.
/// Frobenius-defect-zero is preserved under this transport, so the field
/// tests as projectively gradient exactly when V_T is. The chart box must
/// stay inside the spec's patch, and the field must be defined at the chart
/// center (non-antipodal).
VectorField3 periscope_field_pullback(const spherical::Spec& spec, const GnomonicChart& chart);

/// Displacement field U of a reversed periscope with a 3-dimensional chart
/// (ambient dimension 4), as a VectorField3 on the domain box.
VectorField3 reversed_displacement_field(const reversed::Spec& spec);

} // namespace periscope

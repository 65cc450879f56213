#pragma once

#include <string>
#include <vector>

#include "periscope/vec.hpp"

namespace periscope {

enum class FieldFamily { constant, affine, quadratic, gaussian_bump, sum_of_bumps };
enum class GradientMode { analytic, finite_difference };

const char* to_string(FieldFamily family);
FieldFamily field_family_from_string(const std::string& name);

/// One radial Gaussian term: amplitude * exp(-|p - center|^2 / (2 sigma^2)).
struct Bump {
    double amplitude = 0.0;
    Vec center;
    double sigma = 1.0;
};

/// Closed-form scalar function with an analytic gradient. Mirror shape
/// functions (radial log-functions on a sphere patch, height fields on a
/// chart) are always one of these families, so verification error is limited
/// by round-off rather than by the representation.
///
/// Evaluation and gradients are pure arithmetic on the stored coefficients:
/// the same input reproduces the same output bit for bit.
class ScalarField {
  public:
    /// F(p) = value.
    static ScalarField constant(std::size_t dim, double value);
    /// F(p) = offset + coeffs . p.
    static ScalarField affine(double offset, Vec coeffs);
    /// F(p) = offset + linear . p + p . (Q p), with Q row-major dim x dim.
    static ScalarField quadratic(double offset, Vec linear, std::vector<double> quad);
    /// F(p) = offset + amplitude * exp(-|p - center|^2 / (2 sigma^2)).
    static ScalarField gaussian_bump(double offset, double amplitude, Vec center, double sigma);
    /// F(p) = offset + sum of Gaussian bumps.
    static ScalarField sum_of_bumps(std::size_t dim, double offset, std::vector<Bump> bumps);

    double operator()(const Vec& p) const { return evaluate(p); }
    double evaluate(const Vec& p) const;

    /// Gradient in the configured mode (analytic by default).
    Vec gradient(const Vec& p) const;
    Vec analytic_gradient(const Vec& p) const;

    /// Copy of this field that obtains gradients by central differences.
    ScalarField with_fd_gradient(double step) const;

    FieldFamily family() const { return family_; }
    std::size_t dim() const { return dim_; }
    GradientMode gradient_mode() const { return mode_; }
    double fd_step() const { return fd_step_; }

    double offset() const { return offset_; }
    const Vec& linear() const { return linear_; }
    const std::vector<double>& quad() const { return quad_; }
    const std::vector<Bump>& bumps() const { return bumps_; }

  private:
    ScalarField(FieldFamily family, std::size_t dim) : family_(family), dim_(dim) {}
    void check_point(const Vec& p) const;

    FieldFamily family_ = FieldFamily::constant;
    std::size_t dim_ = 0;
    GradientMode mode_ = GradientMode::analytic;
    double fd_step_ = 1e-6;

    double offset_ = 0.0;
    Vec linear_;              // affine / quadratic
    std::vector<double> quad_; // row-major dim x dim
    std::vector<Bump> bumps_;  // gaussian_bump / sum_of_bumps
};

/// Central-difference gradient, component i = (F(p + h e_i) - F(p - h e_i)) / (2h).
Vec fd_gradient(const ScalarField& field, const Vec& p, double h);

} // namespace periscope

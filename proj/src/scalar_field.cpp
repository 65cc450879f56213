#include "periscope/scalar_field.hpp"

#include <cmath>

namespace periscope {

const char* to_string(FieldFamily family) {
    switch (family) {
        case FieldFamily::constant: return "constant";
        case FieldFamily::affine: return "affine";
        case FieldFamily::quadratic: return "quadratic";
        case FieldFamily::gaussian_bump: return "gaussian-bump";
        case FieldFamily::sum_of_bumps: return "sum-of-bumps";
    }
    return "unknown";
}

FieldFamily field_family_from_string(const std::string& name) {
    if (name == "constant") return FieldFamily::constant;
    if (name == "affine") return FieldFamily::affine;
    if (name == "quadratic") return FieldFamily::quadratic;
    if (name == "gaussian-bump") return FieldFamily::gaussian_bump;
    if (name == "sum-of-bumps") return FieldFamily::sum_of_bumps;
    throw Error(ErrorCode::invalid_argument, "unknown field family '" + name + "'");
}

ScalarField ScalarField::constant(std::size_t dim, double value) {
    ScalarField f(FieldFamily::constant, dim);
    f.offset_ = value;
    return f;
}

ScalarField ScalarField::affine(double offset, Vec coeffs) {
    ScalarField f(FieldFamily::affine, coeffs.dim());
    f.offset_ = offset;
    f.linear_ = std::move(coeffs);
    return f;
}

ScalarField ScalarField::quadratic(double offset, Vec linear, std::vector<double> quad) {
    ScalarField f(FieldFamily::quadratic, linear.dim());
    if (quad.size() != f.dim_ * f.dim_)
        throw Error(ErrorCode::invalid_argument, "quadratic matrix must be dim x dim");
    f.offset_ = offset;
    f.linear_ = std::move(linear);
    f.quad_ = std::move(quad);
    return f;
}

ScalarField ScalarField::gaussian_bump(double offset, double amplitude, Vec center, double sigma) {
    ScalarField f(FieldFamily::gaussian_bump, center.dim());
    if (!(sigma > 0.0))
        throw Error(ErrorCode::invalid_argument, "bump sigma must be positive");
    f.offset_ = offset;
    f.bumps_.push_back(Bump{amplitude, std::move(center), sigma});
    return f;
}

ScalarField ScalarField::sum_of_bumps(std::size_t dim, double offset, std::vector<Bump> bumps) {
    ScalarField f(FieldFamily::sum_of_bumps, dim);
    f.offset_ = offset;
    for (const Bump& b : bumps) {
        if (b.center.dim() != dim)
            throw Error(ErrorCode::dimension_mismatch, "bump center dimension mismatch");
        if (!(b.sigma > 0.0))
            throw Error(ErrorCode::invalid_argument, "bump sigma must be positive");
    }
    f.bumps_ = std::move(bumps);
    return f;
}

void ScalarField::check_point(const Vec& p) const {
    if (p.dim() != dim_)
        throw Error(ErrorCode::dimension_mismatch, "field expects dimension " +
                                                       std::to_string(dim_) + ", got " +
                                                       std::to_string(p.dim()));
}

double ScalarField::evaluate(const Vec& p) const {
    check_point(p);
    switch (family_) {
        case FieldFamily::constant:
            return offset_;
        case FieldFamily::affine:
            return offset_ + linear_.dot(p);
        case FieldFamily::quadratic: {
            double q = 0.0;
            for (std::size_t i = 0; i < dim_; ++i)
                for (std::size_t j = 0; j < dim_; ++j) q += p[i] * quad_[i * dim_ + j] * p[j];
            return offset_ + linear_.dot(p) + q;
        }
        case FieldFamily::gaussian_bump:
        case FieldFamily::sum_of_bumps: {
            double v = offset_;
            for (const Bump& b : bumps_) {
                double r2 = (p - b.center).squared_norm();
                v += b.amplitude * std::exp(-r2 / (2.0 * b.sigma * b.sigma));
            }
            return v;
        }
    }
    return offset_;
}

Vec ScalarField::analytic_gradient(const Vec& p) const {
    check_point(p);
    switch (family_) {
        case FieldFamily::constant:
            return Vec::zero(dim_);
        case FieldFamily::affine:
            return linear_;
        case FieldFamily::quadratic: {
            Vec g = linear_;
            for (std::size_t i = 0; i < dim_; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < dim_; ++j)
                    s += (quad_[i * dim_ + j] + quad_[j * dim_ + i]) * p[j];
                g[i] += s;
            }
            return g;
        }
        case FieldFamily::gaussian_bump:
        case FieldFamily::sum_of_bumps: {
            Vec g = Vec::zero(dim_);
            for (const Bump& b : bumps_) {
                Vec r = p - b.center;
                double w = b.amplitude * std::exp(-r.squared_norm() / (2.0 * b.sigma * b.sigma));
                g += (-w / (b.sigma * b.sigma)) * r;
            }
            return g;
        }
    }
    return Vec::zero(dim_);
}

Vec ScalarField::gradient(const Vec& p) const {
    if (mode_ == GradientMode::analytic) return analytic_gradient(p);
    return fd_gradient(*this, p, fd_step_);
}

ScalarField ScalarField::with_fd_gradient(double step) const {
    if (!(step > 0.0))
        throw Error(ErrorCode::invalid_argument, "finite-difference step must be positive");
    ScalarField f = *this;
    f.mode_ = GradientMode::finite_difference;
    f.fd_step_ = step;
    return f;
}

Vec fd_gradient(const ScalarField& field, const Vec& p, double h) {
    if (!(h > 0.0))
        throw Error(ErrorCode::invalid_argument, "finite-difference step must be positive");
    Vec g(p.dim());
    for (std::size_t i = 0; i < p.dim(); ++i) {
        Vec lo = p;
        Vec hi = p;
        lo[i] -= h;
        hi[i] += h;
        g[i] = (field.evaluate(hi) - field.evaluate(lo)) / (2.0 * h);
    }
    return g;
}

} // namespace periscope

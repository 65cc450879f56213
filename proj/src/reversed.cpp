#include "periscope/reversed.hpp"

#include <cmath>
#include <tuple>

#include "periscope/geometry.hpp"
#include "periscope/grid.hpp"

namespace periscope::reversed {

namespace {

constexpr double kMargin = 1e-9;
constexpr double kVerticalFloor = 1e-9;

struct LocalData {
    double f = 0.0;
    Vec grad_f;
    double mag = 0.0;
};

LocalData local_data(const Spec& spec, const Vec& x) {
    if (x.dim() != spec.chart_dim())
        throw Error(ErrorCode::dimension_mismatch, "chart point dimension mismatch");
    LocalData d;
    d.f = spec.f()(x);
    d.grad_f = spec.f().gradient(x);
    d.mag = d.grad_f.norm();
    if (d.mag < kVerticalFloor)
        throw Error(ErrorCode::vertical_degenerate,
                    "|grad f| vanishes: the vertical ray retroreflects");
    if (d.mag >= 1.0)
        throw Error(ErrorCode::slope_bound, "|grad f| must stay below 1");
    if (spec.C() <= d.f)
        throw Error(ErrorCode::path_budget, "path constant C must exceed f");
    return d;
}

} // namespace

bool Box::contains(const Vec& x, double tol) const {
    if (x.dim() != min.dim()) return false;
    for (std::size_t i = 0; i < x.dim(); ++i)
        if (x[i] < min[i] - tol || x[i] > max[i] + tol) return false;
    return true;
}

Spec::Spec(ScalarField f, double path_constant, Box domain, std::size_t grid_samples)
    : f_(std::move(f)), C_(path_constant), domain_(std::move(domain)) {
    if (f_.dim() < 1)
        throw Error(ErrorCode::invalid_argument, "chart dimension must be at least 1");
    if (!(C_ > 0.0)) throw Error(ErrorCode::invalid_argument, "path constant C must be positive");
    if (domain_.min.dim() != f_.dim() || domain_.max.dim() != f_.dim())
        throw Error(ErrorCode::dimension_mismatch, "domain box dimension must match the field");
    for (std::size_t i = 0; i < f_.dim(); ++i)
        if (!(domain_.min[i] <= domain_.max[i]))
            throw Error(ErrorCode::invalid_argument, "domain box has min > max");
    if (grid_samples < 1) grid_samples = 1;

    // The validity conditions are open conditions; check them on a sample grid.
    BoxGrid grid{domain_.min, domain_.max,
                 std::vector<std::size_t>(f_.dim(), grid_samples)};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Vec x = grid.point(k);
        double mag = f_.gradient(x).norm();
        if (mag <= kMargin)
            throw Error(ErrorCode::vertical_degenerate,
                        "|grad f| must stay positive on the domain");
        if (mag >= 1.0 - kMargin)
            throw Error(ErrorCode::slope_bound, "|grad f| must stay below 1 on the domain");
        if (!(C_ - f_(x) > kMargin))
            throw Error(ErrorCode::path_budget, "C > f must hold on the domain");
    }
}

Synthesis synthesize(const Spec& spec, const Vec& x) {
    LocalData d = local_data(spec, x);
    const double C = spec.C();
    const double m2 = d.mag * d.mag;

    Synthesis s;
    s.x = x;
    s.f_val = d.f;
    s.grad_f = d.grad_f;
    s.grad_f_mag = d.mag;
    s.g_val = (d.f - C * (1.0 - m2)) / m2;
    s.displacement = (2.0 * (C - d.f) / m2) * d.grad_f;
    s.y = x + s.displacement;
    s.alpha = std::atan(d.mag);

    // |PQ| from the impact points themselves; the identity f + g + |PQ| = 2C
    // is a verification target, not an input.
    double height = d.f - s.g_val;
    s.path_length = d.f + s.g_val +
                    std::sqrt(s.displacement.squared_norm() + height * height);
    return s;
}

double second_height(const Spec& spec, const Vec& x) { return synthesize(spec, x).g_val; }

Vec displacement(const Spec& spec, const Vec& x) { return synthesize(spec, x).displacement; }

Vec periscope_map(const Spec& spec, const Vec& x) { return synthesize(spec, x).y; }

Vec second_gradient(const Spec& spec, const Vec& x) {
    LocalData d = local_data(spec, x);
    return (-1.0 / (d.mag * d.mag)) * d.grad_f;
}

double second_height_at(const Spec& spec, const Vec& y, std::optional<Vec> seed) {
    if (y.dim() != spec.chart_dim())
        throw Error(ErrorCode::dimension_mismatch, "chart point dimension mismatch");
    const std::size_t k = spec.chart_dim();

    // Newton iterates are clamped to a padded domain box instead of being
    // allowed to wander where the spec is invalid. The pad also admits
    // preimages a hair outside the box, which difference quotients of the
    // returned height at image-boundary points require; pointwise invariants
    // are still enforced at the solution.
    const double pad = 1e-3;
    auto clamp_to_domain = [&](Vec& p) {
        for (std::size_t i = 0; i < k; ++i) {
            double lo = spec.domain().min[i] - pad;
            double hi = spec.domain().max[i] + pad;
            if (p[i] < lo) p[i] = lo;
            if (p[i] > hi) p[i] = hi;
        }
    };

    // Newton on T(x) = y with a finite-difference Jacobian. Stops well below
    // the 1e-10 contract so finite-difference probes of the returned height
    // are not limited by the solver.
    auto run_newton = [&](Vec x) {
        const double jac_h = 1e-7;
        clamp_to_domain(x);
        bool converged = false;
        for (int iter = 0; iter < 60 && !converged; ++iter) {
            Vec r = periscope_map(spec, x) - y;
            if (r.norm() < 1e-13) {
                converged = true;
                break;
            }
            std::vector<double> J(k * k);
            for (std::size_t j = 0; j < k; ++j) {
                Vec lo = x;
                Vec hi = x;
                lo[j] -= jac_h;
                hi[j] += jac_h;
                clamp_to_domain(lo);
                clamp_to_domain(hi);
                double span = hi[j] - lo[j];
                Vec col = (1.0 / span) * (periscope_map(spec, hi) - periscope_map(spec, lo));
                for (std::size_t i = 0; i < k; ++i) J[i * k + j] = col[i];
            }
            // Solve J s = r by Gaussian elimination with partial pivoting.
            Vec rhs = r;
            bool singular = false;
            for (std::size_t col = 0; col < k && !singular; ++col) {
                std::size_t piv = col;
                for (std::size_t row = col + 1; row < k; ++row)
                    if (std::abs(J[row * k + col]) > std::abs(J[piv * k + col])) piv = row;
                if (std::abs(J[piv * k + col]) < 1e-14) {
                    singular = true;
                    break;
                }
                if (piv != col) {
                    for (std::size_t cc = 0; cc < k; ++cc)
                        std::swap(J[piv * k + cc], J[col * k + cc]);
                    std::swap(rhs[piv], rhs[col]);
                }
                for (std::size_t row = col + 1; row < k; ++row) {
                    double factor = J[row * k + col] / J[col * k + col];
                    for (std::size_t cc = col; cc < k; ++cc)
                        J[row * k + cc] -= factor * J[col * k + cc];
                    rhs[row] -= factor * rhs[col];
                }
            }
            if (singular) break;
            Vec step(k);
            for (std::size_t row = k; row-- > 0;) {
                double s = rhs[row];
                for (std::size_t cc = row + 1; cc < k; ++cc) s -= J[row * k + cc] * step[cc];
                step[row] = s / J[row * k + row];
            }
            x -= step;
            clamp_to_domain(x);
        }
        return std::make_pair(x, converged);
    };

    auto [x, converged] = run_newton(seed.value_or(0.5 * (spec.domain().min + spec.domain().max)));
    if (!converged && (periscope_map(spec, x) - y).norm() >= 1e-10) {
        // A bad seed can pin the iteration against the box wall even when y
        // has a preimage; restart from the coarse-grid point mapping closest
        // to y before giving up.
        BoxGrid scan{spec.domain().min, spec.domain().max, std::vector<std::size_t>(k, 9)};
        Vec best = x;
        double best_miss = (periscope_map(spec, x) - y).norm();
        for (std::size_t i = 0; i < scan.size(); ++i) {
            Vec candidate = scan.point(i);
            double miss = (periscope_map(spec, candidate) - y).norm();
            if (miss < best_miss) {
                best_miss = miss;
                best = candidate;
            }
        }
        std::tie(x, converged) = run_newton(best);
    }

    if (!converged && (periscope_map(spec, x) - y).norm() >= 1e-10) {
        bool pinned = false;
        for (std::size_t i = 0; i < k; ++i)
            if (x[i] <= spec.domain().min[i] - pad / 2 || x[i] >= spec.domain().max[i] + pad / 2)
                pinned = true;
        if (pinned) throw Error(ErrorCode::outside_domain, "y is not in the image of the domain");
        throw Error(ErrorCode::inverse_map, "Newton solve of T(x) = y stalled");
    }
    if (!spec.domain().contains(x, pad))
        throw Error(ErrorCode::outside_domain, "y is not in the image of the domain");
    return second_height(spec, x);
}

} // namespace periscope::reversed

#include "periscope/trace.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "periscope/geometry.hpp"

namespace periscope {

namespace {

/// Distance of `point` from the line through `origin` with unit direction.
double line_distance(const Vec& origin, const Vec& unit_dir, const Vec& point) {
    Vec w = point - origin;
    return (w - w.dot(unit_dir) * unit_dir).norm();
}

double angle_between(const Vec& a, const Vec& b) {
    // Chord form: accurate near zero, where acos of a dot product loses
    // half the significand.
    Vec u = a.normalized();
    Vec v = b.normalized();
    double chord = 0.5 * (u - v).norm();
    return 2.0 * std::asin(std::clamp(chord, 0.0, 1.0));
}

void parallel_fill(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& work) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t k = 0; k < n; ++k) work(k);
        return;
    }
    jobs = std::min<std::size_t>(jobs, n);
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < n; k += jobs) work(k);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace

TraceResult trace_spherical_at(const spherical::Spec& spec, const spherical::Synthesis& syn) {
    const Vec& x = syn.x;
    const Vec origin = Vec::zero(x.dim());

    Vec P = syn.e_f * x;
    Vec normal_x = x - syn.grad_f;
    Vec r1 = reflect_direction(x, normal_x);
    Vec Q = syn.e_g * syn.y;

    TraceResult result{P, Q, Ray(Q, -1.0 * syn.y), 0.0, {}};
    result.residuals["colinearity"] = line_distance(P, r1, Q);

    Vec leg = (Q - P).normalized();
    Vec normal_y = syn.y - syn.grad_g;
    Vec r2 = reflect_direction(leg, normal_y);
    result.out_ray = Ray(Q, r2);
    result.residuals["direction_match"] = angle_between(r2, -1.0 * syn.y);
    result.residuals["return_to_source"] = line_distance(Q, r2, origin);

    result.path_length = syn.e_f + (Q - P).norm() + syn.e_g;
    result.residuals["path_defect"] = std::abs(result.path_length - 2.0 * spec.C());
    return result;
}

TraceResult trace_spherical(const spherical::Spec& spec, const Vec& x) {
    return trace_spherical_at(spec, spherical::synthesize(spec, x));
}

TraceResult trace_reversed_at(const reversed::Spec& spec, const reversed::Synthesis& syn,
                              const ReversedTraceOptions& options) {
    const std::size_t k = syn.x.dim();
    const std::size_t n = k + 1;
    auto lift = [&](const Vec& chart, double height) {
        Vec p(n);
        for (std::size_t i = 0; i < k; ++i) p[i] = chart[i];
        p[k] = height;
        return p;
    };

    Vec P = lift(syn.x, syn.f_val);
    Vec Q = lift(syn.y, syn.g_val);
    Vec up = Vec::unit(n, k);
    Vec down = -1.0 * up;

    Vec normal_x = lift(-1.0 * syn.grad_f, 1.0);
    Vec r1 = reflect_direction(up, normal_x);

    TraceResult result{P, Q, Ray(Q, down), 0.0, {}};
    result.residuals["colinearity"] = line_distance(P, r1, Q);

    // Landing point of the traced ray at the predicted second-mirror height.
    double landing_defect;
    if (options.intersect_second_mirror) {
        // Height of the second mirror via the inverse front map; the implicit
        // surface is p_up - g(horizontal(p)). The bracket spans +/- 10% of the
        // predicted leg so the inverse map stays over the image of the domain.
        ImplicitSurface surface;
        surface.value = [&spec, k](const Vec& p) {
            Vec chart(k);
            for (std::size_t i = 0; i < k; ++i) chart[i] = p[i];
            return p[k] - reversed::second_height_at(spec, chart);
        };
        Ray descending(P, r1);
        double span = (Q - P).norm();
        RayHit hit = ray_surface_intersect(descending, surface, 0.9 * span, 1.1 * span);
        landing_defect = (hit.point - Q).norm();
    } else {
        double t_land = (syn.g_val - syn.f_val) / r1[k];
        Vec landing = P + t_land * r1;
        landing_defect = (landing - Q).norm();
    }
    result.residuals["return_to_source"] = landing_defect;

    Vec leg = (Q - P).normalized();
    Vec grad_g = (-1.0 / (syn.grad_f_mag * syn.grad_f_mag)) * syn.grad_f;
    Vec normal_y = lift(-1.0 * grad_g, 1.0);
    Vec r2 = reflect_direction(leg, normal_y);
    result.out_ray = Ray(Q, r2);
    result.residuals["direction_match"] = angle_between(r2, down);

    result.path_length = syn.f_val + syn.g_val + (Q - P).norm();
    result.residuals["path_defect"] = std::abs(result.path_length - 2.0 * spec.C());
    return result;
}

TraceResult trace_reversed(const reversed::Spec& spec, const Vec& x,
                           const ReversedTraceOptions& options) {
    return trace_reversed_at(spec, reversed::synthesize(spec, x), options);
}

std::vector<SweepRow> sweep_spherical(const spherical::Spec& spec,
                                      const std::vector<std::size_t>& counts, std::size_t jobs) {
    const std::size_t axes = spec.dim() - 1;
    if (counts.size() != axes)
        throw Error(ErrorCode::invalid_argument, "grid must have one count per chart axis");
    double half_width = spec.patch().radius / std::sqrt(static_cast<double>(axes));
    BoxGrid grid = centered_grid(half_width, counts);

    std::vector<SweepRow> rows(grid.size());
    parallel_fill(grid.size(), jobs, [&](std::size_t k) {
        Vec u = grid.point(k);
        Vec x = spec.patch().chart_point(u);
        SweepRow& row = rows[k];
        row.indices = grid.indices(k);
        row.chart_point = u;
        row.point = x;
        try {
            spherical::Synthesis syn = spherical::synthesize(spec, x);
            row.value_a = syn.e_g;
            row.value_b = syn.grad_g_mag;
            row.value_c = syn.d;
            if (syn.antipodal) row.flag = "antipodal";
            row.residuals = trace_spherical_at(spec, syn).residuals;
            row.traced = true;
        } catch (const Error& e) {
            row.flag = to_string(e.code());
        }
    });
    return rows;
}

std::vector<SweepRow> sweep_reversed(const reversed::Spec& spec,
                                     const std::vector<std::size_t>& counts, std::size_t jobs,
                                     const ReversedTraceOptions& options) {
    if (counts.size() != spec.chart_dim())
        throw Error(ErrorCode::invalid_argument, "grid must have one count per domain axis");
    BoxGrid grid{spec.domain().min, spec.domain().max, counts};

    std::vector<SweepRow> rows(grid.size());
    parallel_fill(grid.size(), jobs, [&](std::size_t k) {
        Vec x = grid.point(k);
        SweepRow& row = rows[k];
        row.indices = grid.indices(k);
        row.chart_point = x;
        row.point = x;
        try {
            reversed::Synthesis syn = reversed::synthesize(spec, x);
            row.value_a = syn.g_val;
            row.value_b = 1.0 / syn.grad_f_mag;
            row.value_c = syn.displacement.norm();
            row.residuals = trace_reversed_at(spec, syn, options).residuals;
            row.traced = true;
        } catch (const Error& e) {
            row.flag = to_string(e.code());
        }
    });
    return rows;
}

VerifyReport summarize(const std::vector<SweepRow>& rows) {
    VerifyReport report;
    report.points = rows.size();
    for (const std::string& name : residual_names()) report.residuals[name] = ResidualStats{};

    std::size_t flat = 0;
    for (const SweepRow& row : rows) {
        if (row.traced) {
            ++report.traced;
            for (const auto& [name, value] : row.residuals) {
                ResidualStats& stats = report.residuals[name];
                stats.mean += value;
                if (value >= stats.max) {
                    if (value > stats.max || stats.worst_point.dim() == 0) {
                        stats.max = value;
                        stats.worst_index = flat;
                        stats.worst_point = row.point;
                    }
                }
            }
        } else if (!row.flag.empty() && row.flag != "antipodal") {
            ++report.failed;
            report.failures.emplace_back(flat, row.flag);
        }
        ++flat;
    }
    if (report.traced > 0)
        for (auto& [name, stats] : report.residuals) stats.mean /= static_cast<double>(report.traced);
    return report;
}

VerifyReport grid_verify(const spherical::Spec& spec, const std::vector<std::size_t>& counts,
                         std::size_t jobs) {
    return summarize(sweep_spherical(spec, counts, jobs));
}

VerifyReport grid_verify(const reversed::Spec& spec, const std::vector<std::size_t>& counts,
                         std::size_t jobs) {
    return summarize(sweep_reversed(spec, counts, jobs));
}

} // namespace periscope

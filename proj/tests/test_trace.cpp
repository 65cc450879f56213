#include <doctest.h>

#include <cmath>

#include "periscope/geometry.hpp"
#include "periscope/trace.hpp"
#include "test_helpers.hpp"

using namespace periscope;
namespace pt = periscope::testing;
namespace sph = periscope::spherical;
namespace rev = periscope::reversed;

TEST_CASE("constant mirror: radial retroreflection closes exactly") {
    sph::Spec flat(ScalarField::constant(3, 0.0), 2.0, sph::Patch{Vec{0, 0, 1}, 0.4});
    TraceResult tr = trace_spherical(flat, Vec{0, 0, 1});
    CHECK((tr.P - Vec{0, 0, 1}).norm() == 0.0);
    CHECK((tr.Q - Vec{0, 0, -1}).norm() == 0.0);
    CHECK(tr.path_length == 4.0);
    for (const auto& [name, value] : tr.residuals) CHECK(value < 1e-12);

    VerifyReport report = grid_verify(flat, {11, 11});
    CHECK(report.points == 121);
    CHECK(report.failed == 0);
    for (const auto& [name, stats] : report.residuals) CHECK(stats.max < 1e-12);
}

TEST_CASE("2D worked spherical trace") {
    ScalarField f = ScalarField::affine(0.0, Vec{0.0, 0.5});
    sph::Spec spec(f, 2.0, sph::Patch{Vec{1, 0}, 0.3});
    TraceResult tr = trace_spherical(spec, Vec{1, 0});
    CHECK((tr.P - Vec{1, 0}).norm() == 0.0);
    CHECK((tr.Q - Vec{0.0, 4.0 / 3.0}).norm() < 1e-12);
    CHECK(std::abs(tr.path_length - 4.0) < 1e-12);
    for (const auto& [name, value] : tr.residuals) CHECK(value < 1e-9);
    // Outgoing ray heads back to the origin.
    CHECK((tr.out_ray.direction - Vec{0.0, -1.0}).norm() < 1e-12);
}

TEST_CASE("bump mirror sweep stays below 1e-9; finite differences below 1e-5") {
    sph::Spec spec = pt::bump_sphere_spec();
    VerifyReport report = grid_verify(spec, {15, 15});
    CHECK(report.failed == 0);
    for (const auto& [name, stats] : report.residuals) CHECK(stats.max < 1e-9);

    ScalarField fd_field = spec.f().with_fd_gradient(1e-6);
    sph::Spec fd_spec(fd_field, spec.C(), spec.patch());
    report = grid_verify(fd_spec, {9, 9});
    CHECK(report.failed == 0);
    for (const auto& [name, stats] : report.residuals) CHECK(stats.max < 1e-5);
}

TEST_CASE("negative controls: flipped conventions and perturbed C are caught") {
    sph::Spec spec = pt::bump_sphere_spec();
    Vec x = spec.patch().chart_point(Vec{0.21, -0.13});
    sph::Synthesis good = sph::synthesize(spec, x);
    REQUIRE_FALSE(good.antipodal);

    // Flip the front-map direction: walk away from grad f instead. The
    // flipped configuration is the mirror image of the true one, so the
    // second reflection still closes on itself; what betrays the flip is the
    // predicted Q sitting off the physically reflected ray.
    sph::Synthesis flipped = good;
    flipped.y = sphere_exp(x, (-1.0 / good.grad_f_mag) * good.grad_f, good.d);
    flipped.grad_g = good.grad_g_mag * geodesic_direction(flipped.y, x);
    TraceResult tr = trace_spherical_at(spec, flipped);
    CHECK(tr.residuals.at("colinearity") > 1e-4);
    bool any_large = false;
    for (const auto& [name, value] : tr.residuals) any_large |= value > 1e-4;
    CHECK(any_large);

    // Flip the second-mirror gradient direction.
    sph::Synthesis flipped_g = good;
    flipped_g.grad_g = -1.0 * good.grad_g;
    tr = trace_spherical_at(spec, flipped_g);
    CHECK(tr.residuals.at("direction_match") > 1e-4);

    // Perturb the path constant by 1e-3.
    sph::Spec perturbed(spec.f(), spec.C() + 1e-3, spec.patch());
    sph::Synthesis syn_perturbed = sph::synthesize(perturbed, x);
    tr = trace_spherical_at(spec, syn_perturbed);
    CHECK(tr.residuals.at("path_defect") > 1e-4);
}

TEST_CASE("reflections stay in the plane spanned by ray and normal") {
    sph::Spec spec = pt::bump_sphere_spec();
    auto gen = pt::rng(51);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        double w = spec.patch().radius / std::sqrt(2.0);
        Vec u{w * uni(gen), w * uni(gen)};
        Vec x = spec.patch().chart_point(u);
        sph::Synthesis syn = sph::synthesize(spec, x);
        if (syn.antipodal) continue;
        Vec normal_x = x - syn.grad_f;
        Vec r1 = reflect_direction(x, normal_x);
        CHECK(std::abs(cross(x, normal_x).dot(r1)) < 1e-12);

        Vec P = syn.e_f * x;
        Vec Q = syn.e_g * syn.y;
        Vec leg = (Q - P).normalized();
        Vec normal_y = syn.y - syn.grad_g;
        Vec r2 = reflect_direction(leg, normal_y);
        CHECK(std::abs(cross(leg, normal_y).dot(r2)) < 1e-12);
    }
}

TEST_CASE("reversed affine worked trace is exact") {
    rev::Spec spec = pt::worked_reversed_spec();
    TraceResult tr = trace_reversed(spec, Vec{0.0, 0.0});
    CHECK((tr.P - Vec{0.0, 0.0, 1.0}).norm() == 0.0);
    CHECK((tr.Q - Vec{8.0, 0.0, -5.0}).norm() == 0.0);
    CHECK((tr.Q - tr.P).norm() == 10.0);
    CHECK(tr.path_length == 6.0);
    for (const auto& [name, value] : tr.residuals) CHECK(value < 1e-12);
    CHECK((tr.out_ray.direction - Vec{0.0, 0.0, -1.0}).norm() < 1e-12);
}

TEST_CASE("reversed bump sweep, flipped displacement control, slope-bound edge") {
    rev::Spec spec = pt::bump_reversed_spec();
    VerifyReport report = grid_verify(spec, {21, 21});
    CHECK(report.failed == 0);
    for (const auto& [name, stats] : report.residuals) CHECK(stats.max < 1e-9);

    // Doctored synthesis with reversed displacement direction.
    Vec x{0.8, 0.2};
    rev::Synthesis syn = rev::synthesize(spec, x);
    rev::Synthesis flipped = syn;
    flipped.displacement = -1.0 * syn.displacement;
    flipped.y = syn.x - syn.displacement;
    TraceResult tr = trace_reversed_at(spec, flipped);
    bool any_large = false;
    for (const auto& [name, value] : tr.residuals) any_large |= value > 1e-4;
    CHECK(any_large);

    // Perturbed path constant.
    rev::Spec perturbed(spec.f(), spec.C() + 1e-3, spec.domain());
    rev::Synthesis syn_p = rev::synthesize(perturbed, x);
    tr = trace_reversed_at(spec, syn_p);
    CHECK(tr.residuals.at("path_defect") > 1e-4);

    // Precondition failure: slope reaches 1 outside the validated box.
    ScalarField steep = ScalarField::gaussian_bump(0.0, 2.0, Vec{0.0, 0.0}, 0.6);
    rev::Spec steep_spec(steep, 3.0, rev::Box{Vec{1.5, -0.2}, Vec{2.2, 0.2}});
    CHECK_THROWS_AS(trace_reversed(steep_spec, Vec{0.6, 0.0}), Error);

    // Finite-difference gradient mode stays within the looser bound.
    rev::Spec fd_spec(spec.f().with_fd_gradient(1e-6), spec.C(), spec.domain());
    VerifyReport fd_report = grid_verify(fd_spec, {9, 5});
    CHECK(fd_report.failed == 0);
    for (const auto& [name, stats] : fd_report.residuals) CHECK(stats.max < 1e-5);
}

TEST_CASE("reversed trace against the interpolated second mirror") {
    rev::Spec spec = pt::worked_reversed_spec();
    ReversedTraceOptions options;
    options.intersect_second_mirror = true;
    TraceResult tr = trace_reversed(spec, Vec{0.25, -0.3}, options);
    CHECK(tr.residuals.at("return_to_source") < 1e-8);
    for (const auto& [name, value] : tr.residuals) CHECK(value < 1e-7);
}

TEST_CASE("grid_verify bookkeeping: determinism, parallel agreement, empty and failed points") {
    rev::Spec spec = pt::bump_reversed_spec();
    auto rows1 = sweep_reversed(spec, {9, 5});
    auto rows2 = sweep_reversed(spec, {9, 5});
    auto rows4 = sweep_reversed(spec, {9, 5}, 4);
    REQUIRE(rows1.size() == 45);
    for (std::size_t k = 0; k < rows1.size(); ++k) {
        CHECK(rows1[k].indices == rows2[k].indices);
        CHECK(rows1[k].value_a == rows2[k].value_a);
        CHECK(rows1[k].value_a == rows4[k].value_a);
        for (const auto& [name, v] : rows1[k].residuals) {
            CHECK(v == rows2[k].residuals.at(name));
            CHECK(v == rows4[k].residuals.at(name));
        }
    }
    // Lexicographic order, last axis fastest.
    CHECK(rows1[0].indices == std::vector<std::size_t>{0, 0});
    CHECK(rows1[1].indices == std::vector<std::size_t>{0, 1});
    CHECK(rows1[5].indices == std::vector<std::size_t>{1, 0});

    VerifyReport empty = grid_verify(spec, {0, 0});
    CHECK(empty.points == 0);
    CHECK(empty.failed == 0);

    // A coarse validation grid (corners only) admits a domain whose interior
    // contains the bump apex; the finer sweep then records per-point failures
    // without aborting.
    rev::Spec straddling(spec.f(), 2.0, rev::Box{Vec{-0.4, -0.4}, Vec{0.4, 0.4}}, 2);
    auto rows = sweep_reversed(straddling, {5, 5});
    VerifyReport report = summarize(rows);
    CHECK(report.points == 25);
    CHECK(report.failed > 0);
    CHECK(report.traced + report.failed == 25);
    bool saw_flag = false;
    for (const auto& row : rows)
        if (row.flag == "vertical_degenerate") saw_flag = true;
    CHECK(saw_flag);
}

TEST_CASE("spherical sweep flags antipodal rows and keeps them traced") {
    // Bump centered on the patch base: the center point has grad f = 0.
    ScalarField f = ScalarField::gaussian_bump(0.0, 0.12, Vec{0.0, 0.0, 1.0}, 0.35);
    sph::Spec spec(f, 2.0, sph::Patch{Vec{0, 0, 1}, 0.4});
    auto rows = sweep_spherical(spec, {3, 3});
    bool saw_antipodal = false;
    for (const auto& row : rows) {
        CHECK(row.traced);
        if (row.flag == "antipodal") saw_antipodal = true;
        for (const auto& [name, v] : row.residuals) CHECK(v < 1e-9);
    }
    CHECK(saw_antipodal);
}

#include <doctest.h>

#include <cmath>

#include "periscope/geometry.hpp"
#include "test_helpers.hpp"

using namespace periscope;
namespace pt = periscope::testing;

TEST_CASE("reflect_direction worked examples") {
    // Head-on retroreflection.
    Vec r = reflect_direction(Vec{0, 0, 1}, Vec{0, 0, 1});
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
    CHECK(r[2] == -1.0);

    // Grazing: d orthogonal to N is unchanged.
    r = reflect_direction(Vec{1, 0, 0}, Vec{0, 0, 1});
    CHECK(r[0] == 1.0);
    CHECK(r[2] == 0.0);

    // Oblique 2D case, evaluated directly from d - 2 (d.n) n.
    r = reflect_direction(Vec{1, 0}, Vec{1, -0.5});
    CHECK(r[0] == doctest::Approx(-0.6).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(0.8).epsilon(1e-14));
    // Angle of incidence equals angle of reflection against the unit normal.
    Vec n = Vec{1, -0.5}.normalized();
    CHECK(std::abs(Vec{1, 0}.dot(n)) == doctest::Approx(std::abs(r.dot(n))).epsilon(1e-14));
}

TEST_CASE("reflect_direction rejects degenerate normals") {
    CHECK_THROWS_AS(reflect_direction(Vec{1, 0, 0}, Vec{1e-15, 0, 0}), Error);
    try {
        reflect_direction(Vec{1, 0, 0}, Vec{0, 0, 0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate_normal);
    }
}

TEST_CASE("reflect_direction properties: involution, isometry, coplanarity") {
    auto gen = pt::rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + trial % 4;
        Vec d = pt::random_unit(gen, n);
        Vec N = 3.0 * pt::random_unit(gen, n);
        Vec r = reflect_direction(d, N);
        CHECK(std::abs(r.norm() - 1.0) < 1e-12);
        Vec back = reflect_direction(r, N);
        CHECK((back - d).norm() < 1e-12);
        if (n == 3) {
            // r stays in the span of d and N.
            CHECK(std::abs(cross(d, N).dot(r)) < 1e-12);
        }
    }
}

TEST_CASE("tangential_gradient examples") {
    ScalarField constant = ScalarField::constant(3, 4.2);
    CHECK(tangential_gradient(constant, Vec{0, 1, 0}).norm() == 0.0);

    ScalarField height = ScalarField::affine(0.0, Vec{0, 0, 1});
    CHECK(tangential_gradient(height, Vec{0, 0, 1}).norm() < 1e-15);

    Vec g = tangential_gradient(height, Vec{1, 0, 0});
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.0);
    CHECK(g[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tangential_gradient matches great-circle finite differences") {
    // Independent oracle: differentiate F along geodesics through x.
    ScalarField f = ScalarField::gaussian_bump(0.1, 0.7, Vec{0.3, -0.4, 1.1}, 0.8);
    auto gen = pt::rng(12);
    const double h = 1e-5;
    for (int trial = 0; trial < 30; ++trial) {
        Vec x = pt::random_unit(gen, 3);
        Vec expected = tangential_gradient(f, x);
        Vec reconstructed = Vec::zero(3);
        for (const Vec& b : tangent_basis(x)) {
            double slope = (f(sphere_exp(x, b, h)) - f(sphere_exp(x, b, -h))) / (2.0 * h);
            reconstructed += slope * b;
        }
        CHECK((reconstructed - expected).norm() < 1e-8);
        CHECK(std::abs(expected.dot(x)) < 1e-12);
    }
}

TEST_CASE("sphere_exp examples and sphere invariant") {
    Vec y = sphere_exp(Vec{1, 0, 0}, Vec{0, 1, 0}, std::numbers::pi / 2);
    CHECK((y - Vec{0, 1, 0}).norm() < 1e-15);
    CHECK((sphere_exp(Vec{1, 0, 0}, Vec{0, 1, 0}, 0.0) - Vec{1, 0, 0}).norm() == 0.0);
    Vec anti = sphere_exp(Vec{1, 0, 0}, Vec{0, 1, 0}, std::numbers::pi);
    CHECK((anti - Vec{-1, 0, 0}).norm() < 1e-15);

    auto gen = pt::rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        Vec x = pt::random_unit(gen, 4);
        Vec v = pt::random_tangent(gen, x);
        double t = 3.0 * std::uniform_real_distribution<double>(0.0, 1.0)(gen);
        CHECK(std::abs(sphere_exp(x, v, t).norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("geodesic_direction examples, round trip, errors") {
    Vec u = geodesic_direction(Vec{1, 0, 0}, Vec{0, 1, 0});
    CHECK((u - Vec{0, 1, 0}).norm() < 1e-15);

    Vec y = Vec{std::cos(0.3), std::sin(0.3), 0.0};
    u = geodesic_direction(Vec{1, 0, 0}, y);
    CHECK((u - Vec{0, 1, 0}).norm() < 1e-13);

    CHECK_THROWS_AS(geodesic_direction(Vec{1, 0, 0}, Vec{-1, 0, 0}), Error);
    try {
        geodesic_direction(Vec{1, 0, 0}, Vec{-1, 0, 0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::non_unique_geodesic);
    }
    try {
        geodesic_direction(Vec{1, 0, 0}, Vec{1, 0, 0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::zero_distance);
    }

    auto gen = pt::rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        Vec x = pt::random_unit(gen, 3);
        Vec yy = pt::random_unit(gen, 3);
        if ((yy - x).norm() < 1e-6 || (yy + x).norm() < 1e-6) continue;
        Vec dir = geodesic_direction(x, yy);
        CHECK(std::abs(dir.dot(x)) < 1e-12);
        double angle = std::acos(std::clamp(x.dot(yy), -1.0, 1.0));
        CHECK((sphere_exp(x, dir, angle) - yy).norm() < 1e-12);
    }
}

TEST_CASE("fd_gradient examples") {
    ScalarField constant = ScalarField::constant(2, 3.0);
    CHECK(fd_gradient(constant, Vec{0.3, 0.7}, 1e-4).norm() == 0.0);

    ScalarField affine = ScalarField::affine(1.0, Vec{2.0, -3.0});
    Vec g = fd_gradient(affine, Vec{0.1, 0.2}, 1e-4);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(g[1] == doctest::Approx(-3.0).epsilon(1e-10));

    // |p|^2 has gradient 2p.
    ScalarField norm2 = ScalarField::quadratic(0.0, Vec{0.0, 0.0}, {1.0, 0.0, 0.0, 1.0});
    g = fd_gradient(norm2, Vec{1.0, 2.0}, 1e-4);
    CHECK(std::abs(g[0] - 2.0) < 1e-8);
    CHECK(std::abs(g[1] - 4.0) < 1e-8);
}

TEST_CASE("ray_surface_intersect on spheres and graphs") {
    ImplicitSurface unit_sphere{[](const Vec& p) { return p.norm() - 1.0; },
                                [](const Vec& p) { return p.normalized(); }};
    RayHit hit = ray_surface_intersect(Ray(Vec{0, 0, -5}, Vec{0, 0, 1}), unit_sphere, 0.0, 10.0);
    CHECK(hit.t == doctest::Approx(4.0).epsilon(1e-13));
    CHECK((hit.point - Vec{0, 0, -1}).norm() < 1e-12);

    // Radial ray against a sphere of radius e^c.
    double radius = std::exp(0.7);
    ImplicitSurface sphere{[radius](const Vec& p) { return p.norm() - radius; }, {}};
    Vec x = Vec{2.0, -1.0, 2.0}.normalized();
    hit = ray_surface_intersect(Ray(Vec::zero(3), x), sphere, 0.0, 10.0);
    CHECK(hit.t == doctest::Approx(radius).epsilon(1e-12));

    // 2D graph z = x: the ray from (0, 2) along +x meets it at (2, 2).
    ImplicitSurface graph{[](const Vec& p) { return p[1] - p[0]; }, {}};
    hit = ray_surface_intersect(Ray(Vec{0, 2}, Vec{1, 0}), graph, 0.0, 10.0);
    CHECK(hit.t == doctest::Approx(2.0).epsilon(1e-12));
    CHECK((hit.point - Vec{2, 2}).norm() < 1e-11);
    CHECK(std::abs(graph.value(hit.point)) <= 1e-12 * (1.0 + std::abs(hit.t)));
}

TEST_CASE("ray_surface_intersect error paths") {
    ImplicitSurface plane{[](const Vec& p) { return p[2] - 5.0; }, {}};
    CHECK_THROWS_AS(
        ray_surface_intersect(Ray(Vec{0, 0, 0}, Vec{1, 0, 0}), plane, 0.0, 10.0), Error);
    try {
        ray_surface_intersect(Ray(Vec{0, 0, 0}, Vec{1, 0, 0}), plane, 0.0, 10.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_intersection);
    }

    // Sign change without a root: a step function never satisfies |s| <= tol.
    ImplicitSurface step{[](const Vec& p) { return p[0] < 2.0000005 ? -1e-3 : 1e-3; }, {}};
    try {
        ray_surface_intersect(Ray(Vec{0, 0, 0}, Vec{1, 0, 0}), step, 0.0, 10.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::no_convergence);
    }
}

TEST_CASE("rays normalize their direction on construction") {
    Ray r(Vec{1, 2, 3}, Vec{0, 0, 5});
    CHECK(std::abs(r.direction.norm() - 1.0) < 1e-12);
    CHECK((r.at(2.0) - Vec{1, 2, 5}).norm() < 1e-15);
    CHECK_THROWS_AS(Ray(Vec{0, 0}, Vec{0, 0}), Error);
    CHECK_THROWS_AS(Ray(Vec{0, 0}, Vec{1, 0, 0}), Error);
}

TEST_CASE("tangent_basis is orthonormal and tangent") {
    auto gen = pt::rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 2 + trial % 3;
        Vec x = pt::random_unit(gen, n);
        auto basis = tangent_basis(x);
        CHECK(basis.size() == n - 1);
        for (std::size_t i = 0; i < basis.size(); ++i) {
            CHECK(std::abs(basis[i].dot(x)) < 1e-12);
            for (std::size_t j = 0; j <= i; ++j) {
                double expected = i == j ? 1.0 : 0.0;
                CHECK(std::abs(basis[i].dot(basis[j]) - expected) < 1e-12);
            }
        }
    }
}

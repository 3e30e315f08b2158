#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pacstl/sets.hpp"

using namespace pacstl;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}

Ellipsoid unit_ball(int n) {
    return Ellipsoid(Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n));
}

}  // namespace

TEST_CASE("ellipsoid constructor rejects bad shape matrices") {
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS(Ellipsoid(asym, Eigen::VectorXd::Zero(2)));

    Eigen::MatrixXd indef(2, 2);
    indef << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS(Ellipsoid(indef, Eigen::VectorXd::Zero(2)));

    CHECK_THROWS(Ellipsoid(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(3)));
}

TEST_CASE("membership on boundary points") {
    const Ellipsoid ball = unit_ball(2);
    CHECK(contains(ball, vec2(1.0, 0.0)));
    CHECK_FALSE(contains(ball, vec2(1.001, 0.0)));

    const Zonotope box(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
    CHECK(contains(box, vec2(1.0, 1.0)));
    CHECK_FALSE(contains(box, vec2(1.1, 0.0)));
}

TEST_CASE("support function closed forms") {
    CHECK(support(unit_ball(2), vec2(0.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));

    // Unit ball shifted to center (1, 0).
    const Ellipsoid shifted(Eigen::MatrixXd::Identity(2, 2), vec2(1.0, 0.0));
    CHECK(support(shifted, vec2(1.0, 0.0)) == doctest::Approx(2.0).epsilon(1e-12));

    Eigen::MatrixXd G(2, 2);
    G << 1.0, 1.0, 0.0, 1.0;
    const Zonotope z(vec2(1.0, 0.0), G);
    CHECK(support(z, vec2(1.0, 0.0)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("zonotope support matches exhaustive vertex enumeration") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd c = Eigen::VectorXd::NullaryExpr(2, [&](int) { return u(gen); });
        Eigen::MatrixXd G = Eigen::MatrixXd::NullaryExpr(2, 4, [&](int, int) { return u(gen); });
        const Zonotope z(c, G);
        for (int k = 0; k < 8; ++k) {
            const double ang = 2.0 * kPi * k / 8.0;
            const Eigen::VectorXd a = vec2(std::cos(ang), std::sin(ang));
            double best = -1e300;
            for (int mask = 0; mask < 16; ++mask) {
                Eigen::VectorXd x = c;
                for (int j = 0; j < 4; ++j) x += ((mask >> j & 1) ? 1.0 : -1.0) * G.col(j);
                best = std::max(best, a.dot(x));
            }
            CHECK(support(z, a) == doctest::Approx(best).epsilon(1e-12));
        }
    }
}

TEST_CASE("support dominates every sampled member") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd A(3, 3);
    A << 0.9, 0.1, 0.0, 0.1, 1.4, 0.2, 0.0, 0.2, 0.7;
    Eigen::VectorXd b(3);
    b << 0.3, -0.2, 0.5;
    const Ellipsoid e(A, b);
    for (int i = 0; i < 2000; ++i) {
        // Rejection-free member: x = A^{-1}(b + y) is inside whenever ||y|| <= 1.
        Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(3, [&](int) { return u(gen); });
        if (y.norm() > 1.0) y /= y.norm();
        const Eigen::VectorXd member = e.solve(b + y);
        Eigen::VectorXd a = Eigen::VectorXd::NullaryExpr(3, [&](int) { return u(gen); });
        if (a.norm() < 1e-6) continue;
        CHECK(a.dot(member) <= support(e, a) + 1e-9);
    }
}

TEST_CASE("coordinate projection brackets sampled members") {
    const Ellipsoid e(Eigen::DiagonalMatrix<double, 2>(0.5, 1.0).toDenseMatrix(),
                      Eigen::VectorXd::Zero(2));
    const Interval i0 = project_coord(e, 0);
    CHECK(i0.lo == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(i0.hi == doctest::Approx(2.0).epsilon(1e-12));

    Eigen::VectorXd c = vec2(3.0, 0.0);
    const Zonotope z(c, Eigen::MatrixXd::Identity(2, 2));
    const Interval i1 = project_coord(z, 1);
    CHECK(i1.lo == doctest::Approx(-1.0));
    CHECK(i1.hi == doctest::Approx(1.0));

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        Eigen::VectorXd alpha = Eigen::VectorXd::NullaryExpr(2, [&](int) { return u(gen); });
        const Eigen::VectorXd x = c + alpha;
        CHECK(project_coord(z, 0).contains(x[0]));
        CHECK(project_coord(z, 1).contains(x[1]));
    }
}

TEST_CASE("plane projection of an axis-aligned ellipsoid") {
    Eigen::MatrixXd A = Eigen::Vector3d(1.0, 2.0, 4.0).asDiagonal();
    const Ellipsoid e(A, Eigen::VectorXd::Zero(3));
    const PlanarSet ps = project_plane(e, 0, 2);
    REQUIRE(std::holds_alternative<PlanarEllipse>(ps));
    const auto& pe = std::get<PlanarEllipse>(ps);
    // Semi-axes 1 and 0.25 show up as the square roots of the shape eigenvalues.
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(pe.shape);
    CHECK(std::sqrt(es.eigenvalues()(1)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::sqrt(es.eigenvalues()(0)) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(pe.center.norm() == doctest::Approx(0.0));
}

TEST_CASE("plane projection of a zonotope is a CCW polygon") {
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(3, 3);
    const Zonotope z(Eigen::VectorXd::Zero(3), G);
    const PlanarSet ps = project_plane(z, 0, 1);
    REQUIRE(std::holds_alternative<PlanarPolygon>(ps));
    const auto& poly = std::get<PlanarPolygon>(ps);
    REQUIRE(poly.verts.size() == 4);
    // Shoelace area of the [-1,1]^2 square.
    double area = 0.0;
    for (std::size_t i = 0; i < poly.verts.size(); ++i) {
        const auto& p = poly.verts[i];
        const auto& q = poly.verts[(i + 1) % poly.verts.size()];
        area += p.x() * q.y() - q.x() * p.y();
    }
    CHECK(0.5 * area == doctest::Approx(4.0).epsilon(1e-12));  // positive = CCW
}

TEST_CASE("norm range on simple disks") {
    // Unit disk at (3,0) seen from the origin.
    const PlanarEllipse far{Eigen::Vector2d(3.0, 0.0), Eigen::Matrix2d::Identity()};
    const Interval r1 = norm_range(far, Eigen::Vector2d::Zero());
    CHECK(r1.lo == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r1.hi == doctest::Approx(4.0).epsilon(1e-9));

    // Interior point: min distance is zero.
    const PlanarEllipse origin{Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity()};
    const Interval r2 = norm_range(origin, Eigen::Vector2d(0.5, 0.0));
    CHECK(r2.lo == doctest::Approx(0.0));
    CHECK(r2.hi == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("norm range on an ellipse matches dense boundary sampling") {
    // Semi-axes (2,1), query point (3,3): compare against a 10^6-point sweep.
    Eigen::Matrix2d shape = Eigen::Vector2d(4.0, 1.0).asDiagonal();
    const PlanarEllipse pe{Eigen::Vector2d::Zero(), shape};
    const Eigen::Vector2d p(3.0, 3.0);
    double lo = 1e300, hi = -1e300;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * i / n;
        const Eigen::Vector2d x(2.0 * std::cos(th), std::sin(th));
        const double d = (p - x).norm();
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    const Interval r = norm_range(pe, p);
    CHECK(r.lo == doctest::Approx(lo).epsilon(1e-3));
    CHECK(r.hi == doctest::Approx(hi).epsilon(1e-3));
    // The sweep can only over-estimate the min and under-estimate the max.
    CHECK(r.lo <= lo + 1e-9);
    CHECK(r.hi >= hi - 1e-9);
}

TEST_CASE("norm range on-axis ellipse extremes are exact") {
    Eigen::Matrix2d shape = Eigen::Vector2d(4.0, 1.0).asDiagonal();
    const PlanarEllipse pe{Eigen::Vector2d::Zero(), shape};
    const Interval r = norm_range(pe, Eigen::Vector2d(3.0, 0.0));
    CHECK(r.lo == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.hi == doctest::Approx(5.0).epsilon(1e-9));

    // Query at the center: min 0, max = largest semi-axis.
    const Interval rc = norm_range(pe, Eigen::Vector2d::Zero());
    CHECK(rc.lo == doctest::Approx(0.0));
    CHECK(rc.hi == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("norm range on polygons") {
    PlanarPolygon square;
    square.verts = {Eigen::Vector2d(1, -1), Eigen::Vector2d(1, 1), Eigen::Vector2d(-1, 1),
                    Eigen::Vector2d(-1, -1)};
    const Interval inside = norm_range(square, Eigen::Vector2d(0.0, 0.0));
    CHECK(inside.lo == doctest::Approx(0.0));
    CHECK(inside.hi == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const Interval outside = norm_range(square, Eigen::Vector2d(3.0, 0.0));
    CHECK(outside.lo == doctest::Approx(2.0).epsilon(1e-12));  // nearest edge x = 1
    CHECK(outside.hi == doctest::Approx(std::sqrt(17.0)).epsilon(1e-12));
}

TEST_CASE("norm range encloses sampled members of a skewed ellipse") {
    Eigen::Matrix2d shape;
    shape << 2.0, 0.7, 0.7, 1.0;
    const PlanarEllipse pe{Eigen::Vector2d(1.0, -2.0), shape};
    const Eigen::Vector2d p(-1.5, 0.5);
    const Interval r = norm_range(pe, p);
    const Eigen::LLT<Eigen::Matrix2d> llt(shape);
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        Eigen::Vector2d y(u(gen), u(gen));
        if (y.norm() > 1.0) y /= y.norm();
        const Eigen::Vector2d x = pe.center + llt.matrixL() * y;
        CHECK(r.contains((p - x).norm()));
    }
}

TEST_CASE("affine transport rotates supports and members") {
    Eigen::MatrixXd G(2, 2);
    G << 1.0, 0.0, 0.0, 0.5;
    const Zonotope z(vec2(2.0, 0.0), G);
    Eigen::MatrixXd R(2, 2);
    R << 0.0, -1.0, 1.0, 0.0;  // 90 degrees CCW
    const Eigen::VectorXd t = vec2(0.0, 1.0);
    const ConvexSet moved = affine_transport(ConvexSet(z), R, t);

    // Corner (3, 0.5) must land at R*corner + t = (-0.5, 4).
    CHECK(contains(moved, vec2(-0.5, 4.0)));
    CHECK_FALSE(contains(moved, vec2(-0.6, 4.0)));

    // Support transforms as h_moved(a) = h(R^T a) + a.t for any direction.
    const Ellipsoid e(Eigen::MatrixXd::Identity(2, 2), vec2(1.0, 0.0));
    const ConvexSet me = affine_transport(ConvexSet(e), R, t);
    for (int k = 0; k < 12; ++k) {
        const double ang = 2.0 * kPi * k / 12.0;
        const Eigen::VectorXd a = vec2(std::cos(ang), std::sin(ang));
        CHECK(support(me, a) ==
              doctest::Approx(support(ConvexSet(e), R.transpose() * a) + a.dot(t))
                  .epsilon(1e-10));
    }
}

TEST_CASE("volumes of simple sets") {
    // Semi-axes (2,1): area 2 pi.
    const Ellipsoid e(Eigen::DiagonalMatrix<double, 2>(0.5, 1.0).toDenseMatrix(),
                      Eigen::VectorXd::Zero(2));
    CHECK(volume(e) == doctest::Approx(2.0 * kPi).epsilon(1e-12));

    const Zonotope square(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
    CHECK(volume(square) == doctest::Approx(4.0).epsilon(1e-12));

    // Square plus diagonal generator: 4 * (|det(g1,g2)| + |det(g1,g3)| + |det(g2,g3)|).
    Eigen::MatrixXd G(2, 3);
    G << 1.0, 0.0, 1.0, 0.0, 1.0, 1.0;
    CHECK(volume(Zonotope(Eigen::VectorXd::Zero(2), G)) == doctest::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("zonotope membership test reconstructs a true generator combination") {
    Eigen::MatrixXd G(2, 4);
    G << 1.0, 0.2, -0.4, 0.9, 0.0, 1.1, 0.5, -0.3;
    const Eigen::VectorXd c = vec2(0.5, -1.0);
    const Zonotope z(c, G);
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 5000; ++i) {
        const Eigen::VectorXd x = vec2(u(gen), u(gen));
        if (!contains(z, x)) continue;
        const Eigen::VectorXd alpha = z.Gpinv() * (x - c);
        CHECK(alpha.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-9);
        CHECK((G * alpha - (x - c)).norm() <= 1e-8);
    }
}

TEST_CASE("JSON round trip is bit exact") {
    Eigen::MatrixXd A(2, 2);
    A << 1.25, 0.125, 0.125, 2.5;
    const Ellipsoid e(A, vec2(0.1, -0.7));
    const ConvexSet back = set_from_json(set_to_json(ConvexSet(e)));
    REQUIRE(std::holds_alternative<Ellipsoid>(back));
    CHECK((std::get<Ellipsoid>(back).A() - e.A()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((std::get<Ellipsoid>(back).b() - e.b()).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd G(2, 3);
    G << 1.0, 0.25, -0.5, 0.0, 1.0, 0.75;
    const Zonotope z(vec2(3.0, 4.0), G);
    const ConvexSet zback = set_from_json(set_to_json(ConvexSet(z)));
    REQUIRE(std::holds_alternative<Zonotope>(zback));
    CHECK((std::get<Zonotope>(zback).G() - z.G()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((std::get<Zonotope>(zback).c() - z.c()).cwiseAbs().maxCoeff() == 0.0);
}

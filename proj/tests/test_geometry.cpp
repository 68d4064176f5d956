#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isolab/geometry.hpp"

using namespace isolab;

namespace {

EllipseSpec running_ellipse() { return build_ellipse(2.0, 1.0); }

BumpSpec b1() { return {-1.85, 0.06, 0.05}; }
BumpSpec b2() { return {1.80, 0.05, 0.07}; }
BumpSpec m() { return {-0.8, 0.3, 0.25}; }

// Independent arc-length quadrature: composite Simpson of |r'(u)| on a
// fine uniform grid, for curves given by explicit speed functions.
template <class Speed>
double simpson_length(Speed speed, double u0, double u1, int n) {
    if (n % 2) ++n;
    double h = (u1 - u0) / n, acc = speed(u0) + speed(u1);
    for (int i = 1; i < n; ++i) acc += speed(u0 + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

} // namespace

TEST_CASE("mollifier profile values and support") {
    CHECK(bump_profile(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    // exp(1 - 1/(1 - 1/4)) = exp(-1/3)
    CHECK(bump_profile(0.5) == doctest::Approx(std::exp(-1.0 / 3.0)).epsilon(1e-15));
    CHECK(bump_profile(-0.5) == bump_profile(0.5));
    CHECK(bump_profile(1.0) == 0.0);
    CHECK(bump_profile(-1.0) == 0.0);
    CHECK(bump_profile(1.5) == 0.0);
    // numerically flat near the support edge
    CHECK(std::abs(bump_profile(0.99)) < 1e-20);
}

TEST_CASE("mollifier derivatives match central differences") {
    for (double t : {-0.9, -0.45, 0.1, 0.3, 0.77}) {
        double h = 1e-5;
        double d1 = (bump_profile(t + h) - bump_profile(t - h)) / (2 * h);
        double d2 =
            (bump_profile(t + h) - 2 * bump_profile(t) + bump_profile(t - h)) / (h * h);
        CHECK(bump_profile_d1(t) == doctest::Approx(d1).epsilon(1e-7));
        CHECK(bump_profile_d2(t) == doctest::Approx(d2).epsilon(1e-4));
    }
    CHECK(bump_profile_d1(0.0) == 0.0);
    CHECK(bump_profile_d1(1.2) == 0.0);
}

TEST_CASE("ellipse construction and foci") {
    EllipseSpec e = running_ellipse();
    CHECK(e.c() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(e.focus_left().x() == doctest::Approx(-std::sqrt(3.0)));
    CHECK(e.focus_right().y() == 0.0);
    CHECK_THROWS_AS(build_ellipse(1.0, 1.0), DegenerateEllipse); // circle excluded
    CHECK_THROWS_AS(build_ellipse(1.0, 2.0), DegenerateEllipse);
    CHECK_THROWS_AS(build_ellipse(-2.0, 1.0), DegenerateEllipse);
    CHECK_THROWS_AS(build_ellipse(2.0, 0.0), DegenerateEllipse);
}

TEST_CASE("bottom profile assembles bumps with exact derivatives") {
    BottomProfile bp({b1(), m()});
    CHECK(bp.g(0.3) == 0.0);   // outside both supports
    CHECK(bp.g(-1.85) == doctest::Approx(-0.05).epsilon(1e-15)); // bump peak
    CHECK(bp.g(-0.8) == doctest::Approx(-0.25).epsilon(1e-15));
    for (double x : {-1.87, -1.82, -0.95, -0.8, -0.6}) {
        CHECK(bp.g(x) <= 0.0);
        double h = 1e-6;
        double d1 = (bp.g(x + h) - bp.g(x - h)) / (2 * h);
        CHECK(bp.g1(x) == doctest::Approx(d1).epsilon(1e-6));
        double d2 = (bp.g1(x + h) - bp.g1(x - h)) / (2 * h);
        CHECK(bp.g2(x) == doctest::Approx(d2).epsilon(1e-5));
    }
}

TEST_CASE("bare mushroom perimeter matches independent quadrature") {
    Domain d = build_domain(running_ellipse(), {}, {});
    double a = 2.0, b = 1.0;
    auto arc_speed = [&](double t) {
        return std::sqrt(a * a * std::sin(t) * std::sin(t) +
                         b * b * std::cos(t) * std::cos(t));
    };
    double expect = 2 * a + simpson_length(arc_speed, 0.0, M_PI, 20000);
    CHECK(d.boundary().perimeter() == doctest::Approx(expect).epsilon(1e-10));
    // frozen value as a regression anchor
    CHECK(d.boundary().perimeter() == doctest::Approx(8.84422411027).epsilon(1e-9));
}

TEST_CASE("bumped bottom perimeter matches independent quadrature") {
    Domain d = build_domain(running_ellipse(), {b1(), b2()}, {m()});
    BottomProfile bp({b1(), b2(), m()});
    auto bottom_speed = [&](double x) {
        double g1 = bp.g1(x);
        return std::sqrt(1 + g1 * g1);
    };
    double a = 2.0, bb = 1.0;
    auto arc_speed = [&](double t) {
        return std::sqrt(a * a * std::sin(t) * std::sin(t) +
                         bb * bb * std::cos(t) * std::cos(t));
    };
    double expect = simpson_length(bottom_speed, -2.0, 2.0, 400000) +
                    simpson_length(arc_speed, 0.0, M_PI, 20000);
    CHECK(d.boundary().perimeter() == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("boundary frame: round trip, outward normal, unit vectors") {
    Domain d = build_domain(running_ellipse(), {b1(), b2()}, {m()});
    const MushroomBoundary& bd = d.boundary();
    double per = bd.perimeter();
    for (int i = 0; i < 37; ++i) {
        double s = per * (i + 0.31) / 37.0;
        BoundaryPoint p = bd.eval(s);
        CHECK(p.s == doctest::Approx(s).epsilon(1e-12));
        CHECK(p.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.tangent.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(p.normal.dot(p.tangent)) < 1e-12);
        double step = 1e-6;
        CHECK(!bd.inside(p.position + step * p.normal, 0));
        CHECK(bd.inside(p.position - step * p.normal, 0));
        // locate round trip
        Boundary::Local loc = bd.locate(s);
        CHECK(bd.arc_length_at(loc.piece, loc.u) == doctest::Approx(s).epsilon(1e-10));
    }
}

TEST_CASE("counterclockwise orientation keeps the domain on the left") {
    Domain d = build_domain(running_ellipse(), {}, {m()});
    const MushroomBoundary& bd = d.boundary();
    double per = bd.perimeter();
    // shoelace integral of x dy along the parametrization equals +area
    int n = 20000;
    double area = 0;
    for (int i = 0; i < n; ++i) {
        BoundaryPoint p = bd.eval(per * (i + 0.5) / n);
        area += p.position.x() * p.tangent.y() * (per / n);
    }
    double a = 2.0, b = 1.0;
    double bump_area = 0; // integral of -g over the M support
    BottomProfile bp({m()});
    int nb = 20000;
    for (int i = 0; i < nb; ++i) {
        double x = -1.1 + 0.6 * (i + 0.5) / nb;
        bump_area -= bp.g(x) * (0.6 / nb);
    }
    CHECK(area == doctest::Approx(M_PI * a * b / 2 + bump_area).epsilon(1e-3));
}

TEST_CASE("arc curvature matches the ellipse formula") {
    Domain d = build_domain(running_ellipse(), {}, {});
    const MushroomBoundary& bd = d.boundary();
    double a = 2.0, b = 1.0;
    // kappa(t) = a b / (a^2 sin^2 t + b^2 cos^2 t)^(3/2)
    double per = bd.perimeter();
    for (int i = 0; i < 9; ++i) {
        double s = 4.0 + (per - 4.0) * (i + 0.5) / 9.0; // bottom has length 4
        BoundaryPoint p = bd.eval(s);
        REQUIRE(p.position.y() > 1e-6);
        double t = std::atan2(p.position.y() / b, p.position.x() / a);
        double denom = std::pow(a * a * std::sin(t) * std::sin(t) +
                                    b * b * std::cos(t) * std::cos(t),
                                1.5);
        CHECK(p.curvature == doctest::Approx(a * b / denom).epsilon(1e-8));
    }
}

TEST_CASE("zone classification along the bottom") {
    Domain d = build_domain(running_ellipse(), {b1(), b2()}, {m()});
    const MushroomBoundary& bd = d.boundary();
    auto zone_at_x = [&](double x) {
        // bottom is piece 0 parametrized by x
        return bd.zone_local(0, x);
    };
    CHECK(zone_at_x(-0.8) == Zone::BumpM);
    CHECK(zone_at_x(-1.85) == Zone::BumpB);
    CHECK(zone_at_x(1.80) == Zone::BumpB);
    CHECK(zone_at_x(0.4) == Zone::FlatFocal);
    CHECK(zone_at_x(1.9) == Zone::FlatOuter);
    CHECK(std::string(zone_name(Zone::BumpM)) == "bump-M");
}

TEST_CASE("zone violations are rejected") {
    EllipseSpec e = running_ellipse();
    // support (-1.8, -1.6) straddles the left focus at -1.732
    CHECK_THROWS_AS(build_domain(e, {{-1.7, 0.1, 0.05}}, {}), ZoneViolation);
    // outer bump in the focal zone
    CHECK_THROWS_AS(build_domain(e, {{0.5, 0.1, 0.05}}, {}), ZoneViolation);
    // focal bump in the outer zone
    CHECK_THROWS_AS(build_domain(e, {}, {{1.8, 0.05, 0.05}}), ZoneViolation);
    // support reaching the corner x = -a
    CHECK_THROWS_AS(build_domain(e, {{-1.95, 0.06, 0.05}}, {}), ZoneViolation);
    // center too close to the zone endpoint (clearance 0.02*a = 0.04)
    CHECK_THROWS_AS(build_domain(e, {}, {{-1.70, 0.01, 0.05}}), ZoneViolation);
    // the running example sits inside its zones
    CHECK_NOTHROW(build_domain(e, {b1(), b2()}, {m()}));
}

TEST_CASE("overlapping bumps are rejected") {
    EllipseSpec e = running_ellipse();
    CHECK_THROWS_AS(build_domain(e, {}, {{-0.8, 0.3, 0.1}, {-0.6, 0.3, 0.1}}),
                    OverlapViolation);
    CHECK_THROWS_AS(build_domain(e, {{-1.85, 0.06, 0.05}, {-1.83, 0.05, 0.02}}, {}),
                    OverlapViolation);
    // adjacent but disjoint supports are fine
    CHECK_NOTHROW(build_domain(e, {}, {{-0.9, 0.1, 0.1}, {-0.6, 0.1, 0.1}}));
}

TEST_CASE("bad bump parameters are rejected") {
    EllipseSpec e = running_ellipse();
    CHECK_THROWS(build_domain(e, {}, {{-0.8, 0.0, 0.1}}));
    CHECK_THROWS(build_domain(e, {}, {{-0.8, 0.3, -0.1}}));
}

TEST_CASE("reflection and duality flags") {
    EllipseSpec e = running_ellipse();
    CHECK(mirrored(b1()).center == doctest::Approx(1.85));
    CHECK(mirrored(b1()).half_width == b1().half_width);

    Domain d = build_domain(e, {b1()}, {m()});
    Domain r = reflect(d);
    CHECK(r.spec().outer_bumps[0].center == doctest::Approx(1.85));
    CHECK(r.spec().focal_bumps[0].center == doctest::Approx(0.8));
    CHECK(r.boundary().perimeter() == doctest::Approx(d.boundary().perimeter()).epsilon(1e-14));

    MushroomPair pr = make_mushroom_pair(e, {b1(), b2()}, {m()});
    CHECK(!pr.b_dual); // B1 and B2 are not mirror images
    CHECK(!pr.m_self_dual);
    CHECK(pr.omega1.spec().focal_bumps[0].center == doctest::Approx(-0.8));
    CHECK(pr.omega2.spec().focal_bumps[0].center == doctest::Approx(0.8));
    // outer bumps shared by both members
    CHECK(pr.omega1.spec().outer_bumps == pr.omega2.spec().outer_bumps);

    // mirror-symmetric outer set is dual
    MushroomPair pd = make_mushroom_pair(e, {{-1.85, 0.06, 0.05}, {1.85, 0.06, 0.05}},
                                         {m()});
    CHECK(pd.b_dual);
}

TEST_CASE("corner rounding replaces corners with tangent fillets") {
    EllipseSpec e = running_ellipse();
    Domain sharp = build_domain(e, {}, {});
    CHECK(sharp.boundary().corners().size() == 2);
    Domain round = build_domain(e, {}, {}, 0.05);
    CHECK(round.boundary().corners().empty());
    const MushroomBoundary& bd = round.boundary();
    // boundary is continuous across every piece junction
    for (int pc = 0; pc < bd.piece_count(); ++pc) {
        int nx = (pc + 1) % bd.piece_count();
        Vec2 pend = bd.piece(pc).position(bd.piece(pc).u_end());
        Vec2 nbeg = bd.piece(nx).position(bd.piece(nx).u_begin());
        CHECK((pend - nbeg).norm() < 1e-12);
    }
    // rounding shaves a corner neighborhood off the domain
    CHECK(sharp.boundary().inside({1.995, 0.002}, 0));
    CHECK(!round.boundary().inside({1.995, 0.002}, 0));
    CHECK(round.boundary().perimeter() < sharp.boundary().perimeter());
}

TEST_CASE("inside and vertical slices agree with the bottom profile") {
    Domain d = build_domain(running_ellipse(), {b1()}, {m()});
    const MushroomBoundary& bd = d.boundary();
    BottomProfile bp({b1(), m()});
    for (double x : {-1.85, -0.8, -0.72, 0.3, 1.5}) {
        double ylo = 0, yhi = 0;
        REQUIRE(bd.vertical_slice(x, ylo, yhi));
        CHECK(ylo == doctest::Approx(bp.g(x)).epsilon(1e-12));
        double y_ell = std::sqrt(std::max(0.0, 1.0 - x * x / 4.0));
        CHECK(yhi == doctest::Approx(y_ell).epsilon(1e-12));
        CHECK(bd.inside({x, 0.5 * (ylo + yhi)}, 0));
        CHECK(!bd.inside({x, yhi + 1e-6}, 0));
        CHECK(!bd.inside({x, ylo - 1e-6}, 0));
    }
    double ylo, yhi;
    CHECK(!bd.vertical_slice(2.5, ylo, yhi));
    CHECK(!bd.inside({0.0, -0.5}, 0));
    CHECK(bd.inside({-0.8, -0.2}, 0)); // inside the M bump pocket
}

TEST_CASE("full ellipse boundary basics") {
    FullEllipseBoundary fe(running_ellipse());
    CHECK(fe.inside({0, 0}, 0));
    CHECK(!fe.inside({2.1, 0}, 0));
    double a = 2.0, b = 1.0;
    auto arc_speed = [&](double t) {
        return std::sqrt(a * a * std::sin(t) * std::sin(t) +
                         b * b * std::cos(t) * std::cos(t));
    };
    CHECK(fe.perimeter() ==
          doctest::Approx(simpson_length(arc_speed, 0.0, 2 * M_PI, 40000)).epsilon(1e-10));
    double ylo, yhi;
    REQUIRE(fe.vertical_slice(1.0, ylo, yhi));
    CHECK(yhi == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
    CHECK(ylo == doctest::Approx(-std::sqrt(0.75)).epsilon(1e-12));
}

#include "isolab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isolab {

namespace {

// 7-point Gauss-Legendre rule on [-1, 1]; used for the cumulative
// arc-length tables (per-interval error is far below 1e-15).
constexpr double kGaussX[7] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGaussW[7] = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
    0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
    0.1294849661688697};

double gauss_speed(const Piece& p, double ua, double ub) {
    const double mid = 0.5 * (ua + ub);
    const double half = 0.5 * (ub - ua);
    double acc = 0;
    for (int i = 0; i < 7; ++i) acc += kGaussW[i] * p.speed(mid + half * kGaussX[i]);
    return acc * half;
}

std::string bump_desc(const BumpSpec& b) {
    std::ostringstream os;
    os << "bump(center=" << b.center << ", half_width=" << b.half_width
       << ", depth=" << b.depth << ")";
    return os.str();
}

} // namespace

EllipseSpec build_ellipse(double a, double b) {
    if (!(a > b) || !(b > 0)) {
        std::ostringstream os;
        os << "need a > b > 0, got a=" << a << ", b=" << b;
        throw DegenerateEllipse(os.str());
    }
    return EllipseSpec{a, b};
}

double bump_profile(double t) {
    const double d = 1.0 - t * t;
    if (d <= 0) return 0;
    return std::exp(1.0 - 1.0 / d);
}

double bump_profile_d1(double t) {
    const double d = 1.0 - t * t;
    if (d <= 0) return 0;
    return bump_profile(t) * (-2.0 * t / (d * d));
}

double bump_profile_d2(double t) {
    const double d = 1.0 - t * t;
    if (d <= 0) return 0;
    const double e1 = -2.0 * t / (d * d);              // (d/dt) of the exponent
    const double e2 = -2.0 * (1.0 + 3.0 * t * t) / (d * d * d);
    return bump_profile(t) * (e2 + e1 * e1);
}

BumpSpec mirrored(const BumpSpec& b) { return {-b.center, b.half_width, b.depth}; }

const char* zone_name(Zone z) {
    switch (z) {
        case Zone::Arc: return "arc";
        case Zone::FlatFocal: return "flat-focal";
        case Zone::FlatOuter: return "flat-outer";
        case Zone::BumpM: return "bump-M";
        case Zone::BumpB: return "bump-B";
        case Zone::CornerRegion: return "corner-region";
    }
    return "?";
}

double BottomProfile::g(double x) const {
    double y = 0;
    for (const auto& b : bumps_) {
        if (x > b.support_lo() && x < b.support_hi())
            y -= b.depth * bump_profile((x - b.center) / b.half_width);
    }
    return y;
}

double BottomProfile::g1(double x) const {
    double y = 0;
    for (const auto& b : bumps_) {
        if (x > b.support_lo() && x < b.support_hi())
            y -= b.depth / b.half_width * bump_profile_d1((x - b.center) / b.half_width);
    }
    return y;
}

double BottomProfile::g2(double x) const {
    double y = 0;
    for (const auto& b : bumps_) {
        if (x > b.support_lo() && x < b.support_hi())
            y -= b.depth / (b.half_width * b.half_width) *
                 bump_profile_d2((x - b.center) / b.half_width);
    }
    return y;
}

// ---------------------------------------------------------------- pieces

namespace {

class BottomPiece final : public Piece {
public:
    BottomPiece(const BottomProfile* profile, double x0, double x1)
        : Piece(x0, x1), profile_(profile) {}
    Vec2 position(double u) const override { return {u, profile_->g(u)}; }
    Vec2 derivative(double u) const override { return {1.0, profile_->g1(u)}; }
    Vec2 second_derivative(double u) const override { return {0.0, profile_->g2(u)}; }

private:
    const BottomProfile* profile_;
};

class ArcPiece final : public Piece {
public:
    // u = t, position (a cos t, b sin t); [0, pi] runs the upper arc from
    // (a, 0) to (-a, 0), which is counterclockwise for the mushroom.
    ArcPiece(double a, double b, double t0, double t1) : Piece(t0, t1), a_(a), b_(b) {}
    Vec2 position(double u) const override { return {a_ * std::cos(u), b_ * std::sin(u)}; }
    Vec2 derivative(double u) const override { return {-a_ * std::sin(u), b_ * std::cos(u)}; }
    Vec2 second_derivative(double u) const override {
        return {-a_ * std::cos(u), -b_ * std::sin(u)};
    }

private:
    double a_, b_;
};

class FilletPiece final : public Piece {
public:
    FilletPiece(Vec2 center, double r, double phi0, double phi1)
        : Piece(phi0, phi1), c_(center), r_(r) {}
    Vec2 position(double u) const override {
        return c_ + r_ * Vec2{std::cos(u), std::sin(u)};
    }
    Vec2 derivative(double u) const override {
        return r_ * Vec2{-std::sin(u), std::cos(u)};
    }
    Vec2 second_derivative(double u) const override {
        return r_ * Vec2{-std::cos(u), -std::sin(u)};
    }

private:
    Vec2 c_;
    double r_;
};

} // namespace

// -------------------------------------------------------------- Boundary

void Boundary::finalize(const std::vector<std::vector<double>>& sample_params) {
    const int kTab = 2048;
    tables_.resize(pieces_.size());
    double s_acc = 0;
    for (std::size_t pi = 0; pi < pieces_.size(); ++pi) {
        auto& t = tables_[pi];
        const Piece& p = *pieces_[pi];
        t.s_begin = s_acc;
        t.u_grid.resize(kTab + 1);
        t.s_grid.resize(kTab + 1);
        const double u0 = p.u_begin(), u1 = p.u_end();
        double acc = 0;
        t.u_grid[0] = u0;
        t.s_grid[0] = 0;
        for (int i = 1; i <= kTab; ++i) {
            const double ua = u0 + (u1 - u0) * (i - 1) / kTab;
            const double ub = u0 + (u1 - u0) * i / kTab;
            acc += gauss_speed(p, ua, ub);
            t.u_grid[i] = ub;
            t.s_grid[i] = acc;
        }
        t.length = acc;
        s_acc += acc;
    }
    perimeter_ = s_acc;

    samples_.clear();
    for (std::size_t pi = 0; pi < sample_params.size(); ++pi) {
        for (double u : sample_params[pi]) {
            Sample s;
            s.piece = static_cast<int>(pi);
            s.u = u;
            s.s = arc_length_at(s.piece, u);
            s.pos = pieces_[pi]->position(u);
            samples_.push_back(s);
        }
    }
}

double Boundary::piece_length_to(int piece, double u) const {
    const auto& t = tables_[piece];
    const Piece& p = *pieces_[piece];
    auto it = std::upper_bound(t.u_grid.begin(), t.u_grid.end(), u);
    int i = static_cast<int>(it - t.u_grid.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(t.u_grid.size()) - 2);
    return t.s_grid[i] + gauss_speed(p, t.u_grid[i], u);
}

double Boundary::arc_length_at(int piece, double u) const {
    return tables_[piece].s_begin + piece_length_to(piece, u);
}

Boundary::Local Boundary::locate(double s) const {
    s = std::fmod(s, perimeter_);
    if (s < 0) s += perimeter_;
    int pi = 0;
    for (std::size_t i = 1; i < tables_.size(); ++i) {
        if (s >= tables_[i].s_begin) pi = static_cast<int>(i);
    }
    const auto& t = tables_[pi];
    const Piece& p = *pieces_[pi];
    const double sl = std::min(s - t.s_begin, t.length);
    auto it = std::upper_bound(t.s_grid.begin(), t.s_grid.end(), sl);
    int i = static_cast<int>(it - t.s_grid.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(t.s_grid.size()) - 2);
    // Newton on the cumulative arc length within the bracketed interval.
    double u = t.u_grid[i] + (t.u_grid[i + 1] - t.u_grid[i]) *
                                 (sl - t.s_grid[i]) / (t.s_grid[i + 1] - t.s_grid[i]);
    for (int it2 = 0; it2 < 5; ++it2) {
        const double f = t.s_grid[i] + gauss_speed(p, t.u_grid[i], u) - sl;
        u -= f / p.speed(u);
        u = std::clamp(u, t.u_grid[i] - 1e-12, t.u_grid[i + 1] + 1e-12);
    }
    u = std::clamp(u, p.u_begin(), p.u_end());
    return {pi, u};
}

BoundaryPoint Boundary::eval_local(int piece, double u) const {
    const Piece& p = *pieces_[piece];
    BoundaryPoint bp;
    bp.s = arc_length_at(piece, u);
    bp.position = p.position(u);
    const Vec2 d1 = p.derivative(u);
    const Vec2 d2 = p.second_derivative(u);
    const double sp = d1.norm();
    bp.tangent = d1 / sp;
    bp.normal = Vec2{bp.tangent.y(), -bp.tangent.x()};
    bp.curvature = (d1.x() * d2.y() - d1.y() * d2.x()) / (sp * sp * sp);
    return bp;
}

BoundaryPoint Boundary::eval(double s) const {
    const Local l = locate(s);
    BoundaryPoint bp = eval_local(l.piece, l.u);
    bp.s = std::fmod(s, perimeter_);
    if (bp.s < 0) bp.s += perimeter_;
    return bp;
}

// ------------------------------------------------------ MushroomBoundary

namespace {

// Nearest squared distance from a point to the ellipse quarter t in (0, pi/2),
// by golden-section; returns the minimizing parameter.
double nearest_arc_param(double a, double b, const Vec2& c) {
    auto d2 = [&](double t) {
        const Vec2 e{a * std::cos(t), b * std::sin(t)};
        return (e - c).squaredNorm();
    };
    double lo = 0.0, hi = M_PI / 2;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = d2(x1), f2 = d2(x2);
    for (int i = 0; i < 200; ++i) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo); f1 = d2(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo); f2 = d2(x2);
        }
        if (hi - lo < 1e-15) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

MushroomBoundary::MushroomBoundary(const DomainSpec& spec)
    : spec_(spec), bottom_([&] {
          std::vector<BumpSpec> all = spec.outer_bumps;
          all.insert(all.end(), spec.focal_bumps.begin(), spec.focal_bumps.end());
          std::sort(all.begin(), all.end(),
                    [](const BumpSpec& x, const BumpSpec& y) { return x.center < y.center; });
          return BottomProfile(std::move(all));
      }()) {
    const double a = spec_.ellipse.a, b = spec_.ellipse.b;
    rounded_ = spec_.corner_rounding > 0;

    if (!rounded_) {
        bottom_x0_ = -a;
        bottom_x1_ = a;
        pieces_.push_back(std::make_unique<BottomPiece>(&bottom_, -a, a));
        pieces_.push_back(std::make_unique<ArcPiece>(a, b, 0.0, M_PI));
        bottom_index_ = 0;
        arc_index_ = 1;
        corners_ = {Vec2{-a, 0}, Vec2{a, 0}};
    } else {
        const double r = spec_.corner_rounding;
        if (!(r < 0.4 * b * b / a))
            throw std::invalid_argument("corner rounding radius too large for this ellipse");
        // Fillet circle tangent to the flat bottom at (x_c, 0) and to the
        // ellipse; x_c found by bisection on (nearest distance - r).
        auto gap = [&](double xc) {
            const Vec2 c{xc, r};
            const double t = nearest_arc_param(a, b, c);
            const Vec2 e{a * std::cos(t), b * std::sin(t)};
            return (e - c).norm() - r;
        };
        double lo = a - 6 * r, hi = a - 1e-12 * a;
        if (gap(lo) <= 0) throw std::invalid_argument("corner rounding infeasible");
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (gap(mid) > 0 ? lo : hi) = mid;
        }
        const double xc = 0.5 * (lo + hi);
        right_fillet_.center = Vec2{xc, r};
        right_fillet_.radius = r;
        right_fillet_.t_tangent = nearest_arc_param(a, b, right_fillet_.center);
        const Vec2 tp{a * std::cos(right_fillet_.t_tangent),
                      b * std::sin(right_fillet_.t_tangent)};
        right_fillet_.x_tangent = tp.x();
        right_fillet_.y_tangent = tp.y();
        right_fillet_.phi0 = -M_PI / 2;
        right_fillet_.phi1 = std::atan2(tp.y() - r, tp.x() - xc);

        left_fillet_ = right_fillet_;
        left_fillet_.center = Vec2{-xc, r};
        left_fillet_.x_tangent = -right_fillet_.x_tangent;
        left_fillet_.phi0 = M_PI - right_fillet_.phi1;
        left_fillet_.phi1 = 3 * M_PI / 2;

        bottom_x0_ = -xc;
        bottom_x1_ = xc;
        pieces_.push_back(std::make_unique<BottomPiece>(&bottom_, -xc, xc));
        pieces_.push_back(std::make_unique<FilletPiece>(right_fillet_.center, r,
                                                        right_fillet_.phi0,
                                                        right_fillet_.phi1));
        pieces_.push_back(std::make_unique<ArcPiece>(a, b, right_fillet_.t_tangent,
                                                     M_PI - right_fillet_.t_tangent));
        pieces_.push_back(std::make_unique<FilletPiece>(left_fillet_.center, r,
                                                        left_fillet_.phi0,
                                                        left_fillet_.phi1));
        bottom_index_ = 0;
        right_fillet_index_ = 1;
        arc_index_ = 2;
        left_fillet_index_ = 3;
    }

    // Dense bracketing samples: base density plus extra nodes over each
    // bump support so thin bump walls cannot be stepped over.
    std::vector<std::vector<double>> params(pieces_.size());
    {
        std::vector<double>& bp = params[bottom_index_];
        const int n_base = 2048;
        for (int i = 0; i <= n_base; ++i)
            bp.push_back(bottom_x0_ + (bottom_x1_ - bottom_x0_) * i / n_base);
        for (const auto& bump : bottom_.bumps()) {
            const int n_extra = 384;
            for (int i = 0; i <= n_extra; ++i)
                bp.push_back(bump.support_lo() +
                             (bump.support_hi() - bump.support_lo()) * i / n_extra);
        }
        std::sort(bp.begin(), bp.end());
        bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    }
    for (std::size_t pi = 0; pi < pieces_.size(); ++pi) {
        if (static_cast<int>(pi) == bottom_index_) continue;
        const int n = (static_cast<int>(pi) == arc_index_) ? 2048 : 128;
        for (int i = 0; i <= n; ++i)
            params[pi].push_back(pieces_[pi]->u_begin() +
                                 (pieces_[pi]->u_end() - pieces_[pi]->u_begin()) * i / n);
    }
    finalize(params);
}

bool MushroomBoundary::vertical_slice(double x, double& ylo, double& yhi) const {
    const double a = spec_.ellipse.a, b = spec_.ellipse.b;
    if (!rounded_) {
        if (!(std::abs(x) < a)) return false;
        ylo = bottom_.g(x);
        yhi = b * std::sqrt(std::max(0.0, 1.0 - (x / a) * (x / a)));
        return yhi > ylo;
    }
    const Fillet& rf = right_fillet_;
    const double xc = rf.center.x(), r = rf.radius;
    const double x_max = xc + r * std::max(std::cos(rf.phi1), rf.phi1 > 0 ? 1.0 : -1.0);
    auto ell = [&](double xx) {
        return b * std::sqrt(std::max(0.0, 1.0 - (xx / a) * (xx / a)));
    };
    const double ax = std::abs(x);
    if (!(ax < x_max)) return false;
    if (ax <= xc) {
        ylo = bottom_.g(x);
        yhi = ell(x);
        return yhi > ylo;
    }
    const double root = std::sqrt(std::max(0.0, r * r - (ax - xc) * (ax - xc)));
    ylo = r - root;
    yhi = (ax <= rf.x_tangent) ? ell(x) : r + root;
    return yhi > ylo;
}

bool MushroomBoundary::inside(const Vec2& p, double tol) const {
    double ylo, yhi;
    const double a = spec_.ellipse.a;
    if (!vertical_slice(p.x(), ylo, yhi)) {
        if (tol <= 0) return false;
        // Lateral extremes: retry slightly inward so boundary-adjacent
        // points still count.
        const double xin = std::clamp(p.x(), -a + tol, a - tol);
        if (std::abs(xin) >= a || !vertical_slice(xin, ylo, yhi)) return false;
    }
    return p.y() > ylo - tol && p.y() < yhi + tol;
}

Zone MushroomBoundary::zone_local(int piece, double u) const {
    if (piece == left_fillet_index_ || piece == right_fillet_index_)
        return Zone::CornerRegion;
    const double cr = corner_exclusion_radius();
    if (piece == arc_index_) {
        if (!rounded_) {
            const Vec2 pos = pieces_[piece]->position(u);
            for (const auto& c : corners_)
                if ((pos - c).norm() < cr) return Zone::CornerRegion;
        }
        return Zone::Arc;
    }
    // bottom: u is the abscissa
    const double x = u;
    if (!rounded_ && spec_.ellipse.a - std::abs(x) < cr) return Zone::CornerRegion;
    for (const auto& bump : spec_.focal_bumps)
        if (x > bump.support_lo() && x < bump.support_hi()) return Zone::BumpM;
    for (const auto& bump : spec_.outer_bumps)
        if (x > bump.support_lo() && x < bump.support_hi()) return Zone::BumpB;
    return std::abs(x) < spec_.ellipse.c() ? Zone::FlatFocal : Zone::FlatOuter;
}

// ---------------------------------------------------- FullEllipseBoundary

FullEllipseBoundary::FullEllipseBoundary(const EllipseSpec& e) : ellipse_(e) {
    pieces_.push_back(std::make_unique<ArcPiece>(e.a, e.b, 0.0, 2 * M_PI));
    std::vector<std::vector<double>> params(1);
    const int n = 4096;
    for (int i = 0; i <= n; ++i) params[0].push_back(2 * M_PI * i / n);
    finalize(params);
}

bool FullEllipseBoundary::inside(const Vec2& p, double tol) const {
    const double q = (p.x() / ellipse_.a) * (p.x() / ellipse_.a) +
                     (p.y() / ellipse_.b) * (p.y() / ellipse_.b);
    return q < 1.0 + tol / ellipse_.b;
}

Zone FullEllipseBoundary::zone_local(int, double) const { return Zone::Arc; }

bool FullEllipseBoundary::vertical_slice(double x, double& ylo, double& yhi) const {
    if (!(std::abs(x) < ellipse_.a)) return false;
    const double h = ellipse_.b * std::sqrt(1.0 - (x / ellipse_.a) * (x / ellipse_.a));
    ylo = -h;
    yhi = h;
    return true;
}

// ------------------------------------------------------------ build/pair

namespace {

void validate_bumps(const DomainSpec& spec) {
    const double a = spec.ellipse.a, c = spec.ellipse.c();
    const double d = spec.effective_clearance();
    struct ZoneIv {
        double lo, hi;
        bool outer;
    };
    const ZoneIv zones[3] = {{-a, -c, true}, {-c, c, false}, {c, a, true}};

    auto check = [&](const BumpSpec& b, bool listed_outer) {
        if (!(b.half_width > 0) || !(b.depth > 0))
            throw std::invalid_argument("bump needs positive half_width and depth: " +
                                        bump_desc(b));
        // Support strictly inside one zone; the clearance margin applies to
        // the bump center so narrow bumps may sit close to (but never touch)
        // a focus or corner.
        for (const auto& z : zones) {
            if (b.support_lo() > z.lo && b.support_hi() < z.hi && b.center > z.lo + d &&
                b.center < z.hi - d) {
                if (z.outer != listed_outer)
                    throw ZoneViolation(bump_desc(b) + " listed in the " +
                                        (listed_outer ? "outer" : "focal") +
                                        " list but supported in the " +
                                        (z.outer ? "outer" : "focal") + " zone");
                return;
            }
        }
        throw ZoneViolation(bump_desc(b) +
                            " support crosses a zone endpoint (focus or corner) "
                            "or violates the clearance margin");
    };
    for (const auto& b : spec.outer_bumps) check(b, true);
    for (const auto& b : spec.focal_bumps) check(b, false);

    std::vector<BumpSpec> all = spec.outer_bumps;
    all.insert(all.end(), spec.focal_bumps.begin(), spec.focal_bumps.end());
    std::sort(all.begin(), all.end(),
              [](const BumpSpec& x, const BumpSpec& y) { return x.center < y.center; });
    for (std::size_t i = 1; i < all.size(); ++i) {
        if (all[i - 1].support_hi() > all[i].support_lo())
            throw OverlapViolation(bump_desc(all[i - 1]) + " overlaps " +
                                   bump_desc(all[i]));
    }
}

std::vector<BumpSpec> sorted_by_center(std::vector<BumpSpec> v) {
    std::sort(v.begin(), v.end(),
              [](const BumpSpec& x, const BumpSpec& y) { return x.center < y.center; });
    return v;
}

} // namespace

Domain build_domain(const EllipseSpec& ellipse, const std::vector<BumpSpec>& outer,
                    const std::vector<BumpSpec>& focal, double rounding,
                    double clearance) {
    (void)build_ellipse(ellipse.a, ellipse.b); // re-validate
    if (rounding < 0) throw std::invalid_argument("corner_rounding must be >= 0");

    Domain d;
    d.spec_.ellipse = ellipse;
    d.spec_.outer_bumps = sorted_by_center(outer);
    d.spec_.focal_bumps = sorted_by_center(focal);
    d.spec_.corner_rounding = rounding;
    d.spec_.clearance = clearance;
    validate_bumps(d.spec_);

    auto boundary = std::make_shared<MushroomBoundary>(d.spec_);
    if (rounding > 0) {
        // Rounding support must stay clear of every bump support. The
        // bottom piece starts at (-x_c, 0), so the fillets occupy
        // |x| in [x_c, a].
        const double margin = d.spec_.effective_clearance();
        const double xc = -boundary->eval(0.0).position.x();
        for (const auto& b : d.spec_.outer_bumps) {
            if (b.support_hi() > xc - margin || b.support_lo() < -xc + margin)
                throw OverlapViolation(bump_desc(b) + " meets the corner rounding support");
        }
    }
    d.boundary_ = std::move(boundary);
    return d;
}

DomainSpec reflect_spec(const DomainSpec& spec) {
    DomainSpec r = spec;
    for (auto& b : r.outer_bumps) b = mirrored(b);
    for (auto& b : r.focal_bumps) b = mirrored(b);
    r.outer_bumps = sorted_by_center(r.outer_bumps);
    r.focal_bumps = sorted_by_center(r.focal_bumps);
    return r;
}

Domain reflect(const Domain& d) {
    const DomainSpec r = reflect_spec(d.spec());
    return build_domain(r.ellipse, r.outer_bumps, r.focal_bumps, r.corner_rounding,
                        r.clearance);
}

MushroomPair make_mushroom_pair(const EllipseSpec& ellipse,
                                const std::vector<BumpSpec>& outer,
                                const std::vector<BumpSpec>& focal, double rounding,
                                double clearance) {
    MushroomPair pair;
    pair.omega1 = build_domain(ellipse, outer, focal, rounding, clearance);
    std::vector<BumpSpec> focal_m;
    for (const auto& b : focal) focal_m.push_back(mirrored(b));
    pair.omega2 = build_domain(ellipse, outer, focal_m, rounding, clearance);

    pair.b_dual = [&] {
        std::vector<BumpSpec> m;
        for (const auto& b : outer) m.push_back(mirrored(b));
        return sorted_by_center(m) == sorted_by_center(outer);
    }();
    pair.m_self_dual =
        sorted_by_center(focal_m) == pair.omega1.spec().focal_bumps;
    if (pair.b_dual)
        pair.warnings.push_back("outer bumps are dual: the pair is isometric");
    if (pair.m_self_dual)
        pair.warnings.push_back("focal bumps are self-dual: the pair is identical");
    return pair;
}

MushroomPair make_mushroom_pair(const EllipseSpec& ellipse, const BumpSpec& b1,
                                const BumpSpec& b2, const BumpSpec& m, double rounding,
                                double clearance) {
    const double c = ellipse.c();
    if (!(b1.center < -c)) throw ZoneViolation("B1 must sit in the left outer zone");
    if (!(b2.center > c)) throw ZoneViolation("B2 must sit in the right outer zone");
    if (!(std::abs(m.center) < c)) throw ZoneViolation("M must sit in the focal zone");
    return make_mushroom_pair(ellipse, {b1, b2}, {m}, rounding, clearance);
}

} // namespace isolab

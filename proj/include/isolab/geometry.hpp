#ifndef ISOLAB_GEOMETRY_HPP
#define ISOLAB_GEOMETRY_HPP

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "isolab/errors.hpp"

namespace isolab {

using Vec2 = Eigen::Vector2d;

/// Half-ellipse base of the mushroom construction, centered at the origin
/// with the major axis along y = 0.
struct EllipseSpec {
    double a = 0; // semi-major axis
    double b = 0; // semi-minor axis

    double c() const { return std::sqrt((a - b) * (a + b)); }
    Vec2 focus_left() const { return {-c(), 0.0}; }
    Vec2 focus_right() const { return {c(), 0.0}; }
};

EllipseSpec build_ellipse(double a, double b);

/// Standard mollifier profile: exp(1 - 1/(1 - t^2)) on |t| < 1, zero
/// outside. C-infinity everywhere, peak value 1 at t = 0.
double bump_profile(double t);
double bump_profile_d1(double t);
double bump_profile_d2(double t);

/// One downward bump on the bottom segment. Contributes
/// -depth * phi((x - center)/half_width) to the bottom profile.
struct BumpSpec {
    double center = 0;
    double half_width = 0;
    double depth = 0;

    double support_lo() const { return center - half_width; }
    double support_hi() const { return center + half_width; }

    bool operator==(const BumpSpec&) const = default;
};

BumpSpec mirrored(const BumpSpec& b);

struct DomainSpec {
    EllipseSpec ellipse;
    std::vector<BumpSpec> outer_bumps; // the B bumps, in (-a,-c) or (c,a)
    std::vector<BumpSpec> focal_bumps; // the M bump(s), in (-c,c)
    double corner_rounding = 0;        // fillet radius at (+-a, 0); 0 keeps corners
    double clearance = -1;             // zone endpoint margin; <0 means 0.02*a

    double effective_clearance() const {
        return clearance >= 0 ? clearance : 0.02 * ellipse.a;
    }
    bool operator==(const DomainSpec&) const = default;
};

enum class Zone { Arc, FlatFocal, FlatOuter, BumpM, BumpB, CornerRegion };
const char* zone_name(Zone z);

/// Point on the boundary with frame data. Orientation is counterclockwise
/// (domain on the left of the tangent); normal is the outward unit normal.
struct BoundaryPoint {
    double s = 0;
    Vec2 position{0, 0};
    Vec2 normal{0, 0};
    Vec2 tangent{0, 0};
    double curvature = 0;
};

/// Bottom profile y = g(x) assembled from the bump list; g <= 0 everywhere
/// and g = 0 outside bump supports.
class BottomProfile {
public:
    explicit BottomProfile(std::vector<BumpSpec> bumps) : bumps_(std::move(bumps)) {}
    double g(double x) const;
    double g1(double x) const;
    double g2(double x) const;
    const std::vector<BumpSpec>& bumps() const { return bumps_; }

private:
    std::vector<BumpSpec> bumps_;
};

/// One smooth boundary piece, parametrized by a local parameter u.
class Piece {
public:
    Piece(double u0, double u1) : u0_(u0), u1_(u1) {}
    virtual ~Piece() = default;
    double u_begin() const { return u0_; }
    double u_end() const { return u1_; }
    virtual Vec2 position(double u) const = 0;
    virtual Vec2 derivative(double u) const = 0;
    virtual Vec2 second_derivative(double u) const = 0;
    double speed(double u) const { return derivative(u).norm(); }

private:
    double u0_, u1_;
};

/// Closed boundary curve made of smooth pieces, with arc-length
/// parametrization, dense bracketing samples for ray intersection, and
/// domain membership tests. Immutable after construction.
class Boundary {
public:
    struct Local {
        int piece;
        double u;
    };
    struct Sample {
        int piece;
        double u;
        double s;
        Vec2 pos;
    };

    virtual ~Boundary() = default;

    double perimeter() const { return perimeter_; }
    BoundaryPoint eval(double s) const;
    BoundaryPoint eval_local(int piece, double u) const;
    Local locate(double s) const;
    double arc_length_at(int piece, double u) const;
    int piece_count() const { return static_cast<int>(pieces_.size()); }
    const Piece& piece(int i) const { return *pieces_[i]; }
    const std::vector<Sample>& bracket_samples() const { return samples_; }
    const std::vector<Vec2>& corners() const { return corners_; }

    virtual bool inside(const Vec2& p, double tol = 0) const = 0;
    virtual Zone zone_local(int piece, double u) const = 0;
    /// Vertical extent of the domain at abscissa x; false if the vertical
    /// line misses the domain.
    virtual bool vertical_slice(double x, double& ylo, double& yhi) const = 0;

protected:
    // Derived constructors fill pieces_/corners_/sample counts, then call.
    void finalize(const std::vector<std::vector<double>>& sample_params);

    std::vector<std::unique_ptr<Piece>> pieces_;
    std::vector<Vec2> corners_;

private:
    struct PieceTable {
        double s_begin = 0;
        double length = 0;
        std::vector<double> u_grid;
        std::vector<double> s_grid; // cumulative from piece start
    };
    double piece_length_to(int piece, double u) const;

    std::vector<PieceTable> tables_;
    std::vector<Sample> samples_;
    double perimeter_ = 0;
};

class Domain; // below

class MushroomBoundary final : public Boundary {
public:
    explicit MushroomBoundary(const DomainSpec& spec);

    bool inside(const Vec2& p, double tol = 0) const override;
    Zone zone_local(int piece, double u) const override;
    bool vertical_slice(double x, double& ylo, double& yhi) const override;

    const DomainSpec& spec() const { return spec_; }
    const BottomProfile& bottom() const { return bottom_; }
    /// Corner exclusion radius used by billiard dynamics: 1e-6 * a.
    double corner_exclusion_radius() const { return 1e-6 * spec_.ellipse.a; }

private:
    struct Fillet {
        Vec2 center;       // (x_c, r), mirrored for the left corner
        double radius;
        double phi0, phi1; // traversal range, counterclockwise
        double x_tangent;  // abscissa of the tangency point on the ellipse
        double y_tangent;
        double t_tangent;  // ellipse parameter of the tangency point
    };

    DomainSpec spec_;
    BottomProfile bottom_;
    bool rounded_ = false;
    Fillet right_fillet_{}, left_fillet_{};
    double bottom_x0_, bottom_x1_; // bottom piece extent
    int bottom_index_ = 0, arc_index_ = 1;
    int left_fillet_index_ = -1, right_fillet_index_ = -1;
};

/// Full ellipse boundary; validation geometry for billiard orbit checks.
class FullEllipseBoundary final : public Boundary {
public:
    explicit FullEllipseBoundary(const EllipseSpec& e);
    bool inside(const Vec2& p, double tol = 0) const override;
    Zone zone_local(int piece, double u) const override;
    bool vertical_slice(double x, double& ylo, double& yhi) const override;
    const EllipseSpec& ellipse() const { return ellipse_; }

private:
    EllipseSpec ellipse_;
};

/// A validated mushroom domain: spec plus its constructed boundary.
class Domain {
public:
    Domain() = default;
    const DomainSpec& spec() const { return spec_; }
    const MushroomBoundary& boundary() const { return *boundary_; }
    const EllipseSpec& ellipse() const { return spec_.ellipse; }

    friend Domain build_domain(const EllipseSpec&, const std::vector<BumpSpec>&,
                               const std::vector<BumpSpec>&, double, double);

private:
    DomainSpec spec_;
    std::shared_ptr<const MushroomBoundary> boundary_;
};

Domain build_domain(const EllipseSpec& ellipse, const std::vector<BumpSpec>& outer,
                    const std::vector<BumpSpec>& focal, double rounding = 0,
                    double clearance = -1);

Domain reflect(const Domain& d);
DomainSpec reflect_spec(const DomainSpec& spec);

/// The pair (Omega_1, Omega_2): same ellipse and outer bumps, focal bumps
/// mirrored between the two members.
struct MushroomPair {
    Domain omega1;
    Domain omega2;
    bool b_dual = false;      // mirrored outer-bump list reproduces itself
    bool m_self_dual = false; // mirrored focal-bump list reproduces itself
    std::vector<std::string> warnings;
};

MushroomPair make_mushroom_pair(const EllipseSpec& ellipse, const BumpSpec& b1,
                                const BumpSpec& b2, const BumpSpec& m,
                                double rounding = 0, double clearance = -1);
MushroomPair make_mushroom_pair(const EllipseSpec& ellipse,
                                const std::vector<BumpSpec>& outer,
                                const std::vector<BumpSpec>& focal,
                                double rounding = 0, double clearance = -1);

} // namespace isolab

#endif

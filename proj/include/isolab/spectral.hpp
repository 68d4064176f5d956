#ifndef ISOLAB_SPECTRAL_HPP
#define ISOLAB_SPECTRAL_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "isolab/geometry.hpp"

namespace isolab {

/// Geometry interface consumed by the eigenvalue machinery. All shapes are
/// vertically convex: a vertical line meets the domain in one interval.
class Shape {
public:
    struct BNode {
        double s = 0;
        Vec2 pos{0, 0};
        Vec2 normal{0, 0};
        double weight = 0; // arc-length quadrature weight
    };

    virtual ~Shape() = default;
    virtual bool inside(const Vec2& p, double tol = 0) const = 0;
    virtual bool vertical_slice(double x, double& ylo, double& yhi) const = 0;
    virtual double x_min() const = 0;
    virtual double x_max() const = 0;
    virtual double y_min() const = 0;
    virtual double y_max() const = 0;
    /// Boundary quadrature nodes; n is a density target, the actual count
    /// may be larger (panels are aligned with geometric features).
    virtual std::vector<BNode> boundary_nodes(int n) const = 0;
    /// Candidate exterior-source anchors: boundary point, outward normal and
    /// the local feature scale controlling the source offset there. The
    /// default is uniform placement at the global feature scale; shapes with
    /// small boundary features refine near them.
    struct SourceSite {
        Vec2 pos{0, 0};
        Vec2 normal{0, 0};
        double scale = 0;
    };
    virtual std::vector<SourceSite> source_sites(int n) const;
    virtual std::vector<Vec2> corners() const = 0;
    /// Scale used for the exterior source offset.
    virtual double feature_scale() const = 0;

    double diameter() const { return std::max(x_max() - x_min(), y_max() - y_min()); }
};

class DiskShape final : public Shape {
public:
    explicit DiskShape(double radius = 1.0) : r_(radius) {}
    bool inside(const Vec2& p, double tol = 0) const override;
    bool vertical_slice(double x, double& ylo, double& yhi) const override;
    double x_min() const override { return -r_; }
    double x_max() const override { return r_; }
    double y_min() const override { return -r_; }
    double y_max() const override { return r_; }
    std::vector<BNode> boundary_nodes(int n) const override;
    std::vector<Vec2> corners() const override { return {}; }
    double feature_scale() const override { return 2 * r_; }

private:
    double r_;
};

class HalfDiskShape final : public Shape {
public:
    explicit HalfDiskShape(double radius = 1.0) : r_(radius) {}
    bool inside(const Vec2& p, double tol = 0) const override;
    bool vertical_slice(double x, double& ylo, double& yhi) const override;
    double x_min() const override { return -r_; }
    double x_max() const override { return r_; }
    double y_min() const override { return 0; }
    double y_max() const override { return r_; }
    std::vector<BNode> boundary_nodes(int n) const override;
    std::vector<Vec2> corners() const override { return {{-r_, 0}, {r_, 0}}; }
    double feature_scale() const override { return 2 * r_; }

private:
    double r_;
};

/// Axis-aligned rectangle (0,w) x (0,h); finite-difference validation shape.
class RectShape final : public Shape {
public:
    RectShape(double w, double h) : w_(w), h_(h) {}
    bool inside(const Vec2& p, double tol = 0) const override;
    bool vertical_slice(double x, double& ylo, double& yhi) const override;
    double x_min() const override { return 0; }
    double x_max() const override { return w_; }
    double y_min() const override { return 0; }
    double y_max() const override { return h_; }
    std::vector<BNode> boundary_nodes(int n) const override;
    std::vector<Vec2> corners() const override {
        return {{0, 0}, {w_, 0}, {w_, h_}, {0, h_}};
    }
    double feature_scale() const override { return std::min(w_, h_); }

private:
    double w_, h_;
};

class MushroomShape final : public Shape {
public:
    explicit MushroomShape(Domain domain);
    bool inside(const Vec2& p, double tol = 0) const override;
    bool vertical_slice(double x, double& ylo, double& yhi) const override;
    double x_min() const override { return -domain_.ellipse().a; }
    double x_max() const override { return domain_.ellipse().a; }
    double y_min() const override;
    double y_max() const override { return domain_.ellipse().b; }
    std::vector<BNode> boundary_nodes(int n) const override;
    std::vector<SourceSite> source_sites(int n) const override;
    std::vector<Vec2> corners() const override;
    double feature_scale() const override;
    const Domain& domain() const { return domain_; }

private:
    Domain domain_;
};

struct MfsOptions {
    int n_src = 200;          // source count
    int n_col = 0;            // boundary collocation count; 0 means 2.5*n_src
    int n_int = 0;            // interior regularization points; 0 means n_src/6
    int max_src = 0;          // hard cap on placed sources; 0 means no cap
    double offset_factor = 0.15;
    double minimum_threshold = 0.2; // indicator value below which a dip counts
};

/// Fundamental-solution basis: radial Helmholtz solutions Y0(k r) centered
/// at exterior source points along an offset of the boundary.
struct HelmholtzBasis {
    double k = 0;
    std::vector<Vec2> sources;

    double eval(const Vec2& p, int j) const;
    Vec2 grad(const Vec2& p, int j) const;
};

HelmholtzBasis make_basis(const Shape& shape, double k, const MfsOptions& opt);

struct IndicatorState {
    double value = 0;        // smallest boundary singular value
    double second = 0;       // next singular value; simplicity diagnostic
    std::vector<double> coeffs;
    HelmholtzBasis basis;
};

double indicator(const Shape& shape, double k, const MfsOptions& opt = {});
IndicatorState indicator_full(const Shape& shape, double k, const MfsOptions& opt = {});

std::vector<double> indicator_sweep(const Shape& shape, const std::vector<double>& ks,
                                    const MfsOptions& opt = {},
                                    bool serial_reference = false);

struct EigenPair {
    double lambda = 0;
    double k = 0;
    HelmholtzBasis basis;
    std::vector<double> coeffs;       // normalized: integral of psi^2 = 1
    double indicator_value = 0;
    double second_singular_value = 0;
    double boundary_residual = 0;     // max |psi| on a dense boundary grid,
                                      // relative to the interior RMS
    double error_bar = 0;             // absolute error estimate on lambda
    std::shared_ptr<const Shape> shape;

    double eval(const Vec2& p) const; // unchecked evaluation
};

struct FindEigsResult {
    std::vector<EigenPair> pairs;
    std::vector<std::string> warnings; // possibly-missed-eigenvalue notes
};

FindEigsResult find_eigs(std::shared_ptr<const Shape> shape, double k_min, double k_max,
                         int n_scan, const MfsOptions& opt = {});

/// Checked evaluation (throws OutsideDomain).
double eval_eigenfunction(const EigenPair& pair, const Vec2& p);

/// Mirror image x -> -x: same coefficients over mirrored sources. Exact at
/// floating-point level because point-source distances are preserved.
EigenPair reflect_eigenpair(const EigenPair& pair,
                            std::shared_ptr<const Shape> mirrored_shape);

/// Batch evaluation kernel; the hot loop of every area quadrature.
void eval_eigenfunction_batch(const EigenPair& pair, const std::vector<Vec2>& pts,
                              std::vector<double>& out, bool serial_reference = false);

struct BoundaryTrace {
    struct Node {
        double s = 0;
        Vec2 pos{0, 0};
        Vec2 normal{0, 0};
        double dpsi_dnu = 0;
        double weight = 0;
    };
    std::vector<Node> nodes;
    std::shared_ptr<const EigenPair> pair; // evaluation handle for refinement

    /// Normal derivative at a bottom point (x, 0) with outward normal (0,-1).
    double dnu_at_bottom(double x) const;
};

BoundaryTrace normal_trace(std::shared_ptr<const EigenPair> pair, int n_nodes);

/// Area integral of psi^2 by composite Gauss-Legendre strips (primary
/// quadrature, used for normalization).
double integrate_psi2_strips(const EigenPair& pair, int n_panels_x = 240,
                             int n_gauss_y = 24);
/// Independent grid-based quadrature: uniform columns, per-column composite
/// Simpson between the exact boundary cuts.
double integrate_psi2_grid(const EigenPair& pair, double h);

/// Boundary integral of (dpsi/dnu)^2 (x.nu) dsigma; equals 2*lambda for a
/// normalized Dirichlet eigenfunction (Rellich identity), used as an
/// independent consistency oracle.
double rellich_integral(const BoundaryTrace& trace);

struct FdOracleOptions {
    std::uint64_t seed = 12345; // start block for the subspace iteration
    int max_iters = 400;
    double tol = 1e-10;
};

/// Five-point finite-difference Dirichlet eigenvalues on a uniform grid;
/// independent low-order oracle (O(h) accurate, staircase boundary).
std::vector<double> fd_oracle(const Shape& shape, double h, int n_eigs,
                              const FdOracleOptions& opt = {});

} // namespace isolab

#endif

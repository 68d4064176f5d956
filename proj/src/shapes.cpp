#include "isolab/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace isolab {

namespace {

// 12-point Gauss-Legendre on [-1, 1].
constexpr int kG = 12;
constexpr double kGx[kG] = {
    -0.98156063424671925069, -0.90411725637047485668, -0.76990267419430468704,
    -0.58731795428661744730, -0.36783149899818019375, -0.12523340851146891547,
    0.12523340851146891547,  0.36783149899818019375,  0.58731795428661744730,
    0.76990267419430468704,  0.90411725637047485668,  0.98156063424671925069};
constexpr double kGw[kG] = {
    0.04717533638651182719, 0.10693932599531843096, 0.16007832854334622633,
    0.20316742672306592175, 0.23349253653835480876, 0.24914704581340278500,
    0.24914704581340278500, 0.23349253653835480876, 0.20316742672306592175,
    0.16007832854334622633, 0.10693932599531843096, 0.04717533638651182719};

} // namespace

std::vector<Shape::SourceSite> Shape::source_sites(int n) const {
    auto nodes = boundary_nodes(n);
    double scale = std::min(diameter(), feature_scale());
    std::vector<SourceSite> out;
    out.reserve(nodes.size());
    for (const auto& nd : nodes) out.push_back({nd.pos, nd.normal, scale});
    return out;
}

bool DiskShape::inside(const Vec2& p, double tol) const {
    return p.norm() < r_ - tol;
}

bool DiskShape::vertical_slice(double x, double& ylo, double& yhi) const {
    if (std::abs(x) >= r_) return false;
    double h = std::sqrt((r_ - x) * (r_ + x));
    ylo = -h;
    yhi = h;
    return true;
}

std::vector<Shape::BNode> DiskShape::boundary_nodes(int n) const {
    // Periodic trapezoid rule: spectrally accurate on the smooth circle.
    n = std::max(n, 16);
    std::vector<BNode> nodes(n);
    double dth = 2 * M_PI / n;
    for (int i = 0; i < n; ++i) {
        double th = (i + 0.5) * dth;
        Vec2 nu{std::cos(th), std::sin(th)};
        nodes[i] = {r_ * th, r_ * nu, nu, r_ * dth};
    }
    return nodes;
}

bool HalfDiskShape::inside(const Vec2& p, double tol) const {
    return p.norm() < r_ - tol && p.y() > tol;
}

bool HalfDiskShape::vertical_slice(double x, double& ylo, double& yhi) const {
    if (std::abs(x) >= r_) return false;
    ylo = 0;
    yhi = std::sqrt((r_ - x) * (r_ + x));
    return true;
}

namespace {

// Composite Gauss panels over a parametrized boundary segment.
template <class F>
void add_panels(std::vector<Shape::BNode>& out, double u0, double u1, int n_panels,
                const F& eval) {
    for (int p = 0; p < n_panels; ++p) {
        double a = u0 + (u1 - u0) * p / n_panels;
        double b = u0 + (u1 - u0) * (p + 1) / n_panels;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < kG; ++i) {
            Shape::BNode node = eval(mid + half * kGx[i]);
            node.weight *= half * kGw[i];
            out.push_back(node);
        }
    }
}

} // namespace

std::vector<Shape::BNode> HalfDiskShape::boundary_nodes(int n) const {
    n = std::max(n, 48);
    std::vector<BNode> out;
    // Bottom diameter, left to right; s starts at (-r, 0).
    int nb = std::max(4, static_cast<int>(n * 2.0 / (2.0 + M_PI) / kG));
    add_panels(out, -r_, r_, nb, [&](double x) {
        return BNode{x + r_, {x, 0}, {0, -1}, 1.0};
    });
    // Arc, counterclockwise from (r, 0) to (-r, 0).
    int na = std::max(6, static_cast<int>(n * M_PI / (2.0 + M_PI) / kG));
    add_panels(out, 0.0, M_PI, na, [&](double th) {
        Vec2 nu{std::cos(th), std::sin(th)};
        return BNode{2 * r_ + r_ * th, r_ * nu, nu, r_};
    });
    return out;
}

bool RectShape::inside(const Vec2& p, double tol) const {
    return p.x() > tol && p.x() < w_ - tol && p.y() > tol && p.y() < h_ - tol;
}

bool RectShape::vertical_slice(double x, double& ylo, double& yhi) const {
    if (x <= 0 || x >= w_) return false;
    ylo = 0;
    yhi = h_;
    return true;
}

std::vector<Shape::BNode> RectShape::boundary_nodes(int n) const {
    n = std::max(n, 32);
    double per = 2 * (w_ + h_);
    std::vector<BNode> out;
    auto side = [&](Vec2 p0, Vec2 p1, Vec2 nu, double s0) {
        double len = (p1 - p0).norm();
        int np = std::max(2, static_cast<int>(n * len / per / kG));
        add_panels(out, 0.0, len, np, [&](double u) {
            Vec2 pos = p0 + (u / len) * (p1 - p0);
            return BNode{s0 + u, pos, nu, 1.0};
        });
    };
    side({0, 0}, {w_, 0}, {0, -1}, 0);
    side({w_, 0}, {w_, h_}, {1, 0}, w_);
    side({w_, h_}, {0, h_}, {0, 1}, w_ + h_);
    side({0, h_}, {0, 0}, {-1, 0}, 2 * w_ + h_);
    return out;
}

MushroomShape::MushroomShape(Domain domain) : domain_(std::move(domain)) {}

bool MushroomShape::inside(const Vec2& p, double tol) const {
    return domain_.boundary().inside(p, tol);
}

bool MushroomShape::vertical_slice(double x, double& ylo, double& yhi) const {
    return domain_.boundary().vertical_slice(x, ylo, yhi);
}

double MushroomShape::y_min() const {
    double ymin = 0;
    const auto& spec = domain_.spec();
    for (const auto& list : {spec.outer_bumps, spec.focal_bumps})
        for (const auto& b : list) ymin = std::min(ymin, -b.depth);
    return ymin;
}

std::vector<Vec2> MushroomShape::corners() const {
    return domain_.boundary().corners();
}

double MushroomShape::feature_scale() const {
    // Source offset scale: keep sources clear of neighboring bump features.
    const auto& spec = domain_.spec();
    std::vector<double> centers;
    for (const auto& list : {spec.outer_bumps, spec.focal_bumps})
        for (const auto& b : list) centers.push_back(b.center);
    double scale = diameter();
    std::sort(centers.begin(), centers.end());
    for (std::size_t i = 1; i < centers.size(); ++i)
        scale = std::min(scale, centers[i] - centers[i - 1]);
    return scale;
}

std::vector<Shape::SourceSite> MushroomShape::source_sites(int n) const {
    // Uniform arc-length placement at the global scale, replaced near each
    // bump by a refined row of sites whose offset scale is the bump width:
    // sources must sit within a feature size of the boundary to resolve it.
    const Boundary& bd = domain_.boundary();
    const auto& spec = domain_.spec();
    std::vector<BumpSpec> bumps;
    for (const auto& list : {spec.outer_bumps, spec.focal_bumps})
        bumps.insert(bumps.end(), list.begin(), list.end());

    double global = std::min(diameter(), feature_scale());
    std::vector<SourceSite> out;
    n = std::max(n, 32);
    for (int i = 0; i < n; ++i) {
        BoundaryPoint p = bd.eval(bd.perimeter() * (i + 0.5) / n);
        bool near_bump = false;
        if (std::abs(p.position.y()) < 1e-12 || p.position.y() < 0) {
            for (const auto& b : bumps)
                if (p.position.x() > b.support_lo() - b.half_width &&
                    p.position.x() < b.support_hi() + b.half_width)
                    near_bump = true;
        }
        if (!near_bump) out.push_back({p.position, p.normal, global});
    }
    // Each bump-support endpoint is a non-analyticity of the boundary (the
    // mollifier is analytic strictly inside its support and identically zero
    // outside). Sources cluster geometrically toward each endpoint with the
    // offset scale tied to the distance, as for a corner; the grading stops
    // where the profile is flat to machine precision (~1% of the width).
    // The offset of an exterior source is limited by how far the interior
    // eigenfunction continues across the boundary: geometrically by the
    // distance to the nearest support endpoint (a non-analyticity of the
    // mollifier) and by the local curvature radius. March across each bump
    // with a step proportional to that local scale, symmetrically from both
    // ends so mirrored domains get mirrored sites.
    // Tuned jointly with the collocation grading: a coarser march loses the
    // small features, a denser one drives the offsets below the collocation
    // spacing and the residual between nodes blows up while the discrete
    // indicator still looks converged.
    const double alpha = 0.10;  // march step, in units of the local scale
    const double kcap = 0.5;    // curvature-radius fraction
    const double dfloor = 0.02; // grading floor; the profile is flat below it
    for (const auto& b : bumps) {
        double w = b.half_width;
        double lo = b.support_lo() - w, hi = b.support_hi() + w;
        double mid = 0.5 * (lo + hi);
        auto local_scale = [&](double x) {
            double dist = std::min(std::abs(x - b.support_lo()),
                                   std::abs(x - b.support_hi()));
            double kappa = std::abs(bd.eval_local(0, x).curvature);
            return std::max(dfloor * w, std::min({dist, kcap / std::max(kappa, 1e-9), w}));
        };
        std::vector<double> xs;
        double x = lo;
        while (x < mid) {
            xs.push_back(x);
            x += alpha * local_scale(x);
        }
        std::size_t half = xs.size();
        for (std::size_t i = 0; i < half; ++i) xs.push_back(lo + hi - xs[half - 1 - i]);
        for (double xi : xs) {
            BoundaryPoint p = bd.eval_local(0, xi);
            out.push_back({p.position, p.normal, 3.0 * local_scale(xi)});
        }
    }
    return out;
}

std::vector<Shape::BNode> MushroomShape::boundary_nodes(int n) const {
    n = std::max(n, 64);
    const Boundary& bd = domain_.boundary();
    double per = bd.perimeter();
    double target = per / std::max(8, n / kG); // target panel length
    std::vector<BNode> out;

    auto eval_node = [&](int pc, double u) {
        BoundaryPoint bp = bd.eval_local(pc, u);
        return BNode{bp.s, bp.position, bp.normal, bd.piece(pc).speed(u)};
    };

    const auto& spec = domain_.spec();
    for (int pc = 0; pc < bd.piece_count(); ++pc) {
        const Piece& piece = bd.piece(pc);
        double u0 = piece.u_begin(), u1 = piece.u_end();
        if (pc == 0) { // bottom piece, parametrized by x
            // Panel edges snapped to bump supports, doubled density over bumps.
            std::vector<double> edges{u0};
            std::vector<BumpSpec> bumps;
            for (const auto& list : {spec.outer_bumps, spec.focal_bumps})
                bumps.insert(bumps.end(), list.begin(), list.end());
            std::sort(bumps.begin(), bumps.end(),
                      [](const BumpSpec& x, const BumpSpec& y) { return x.center < y.center; });
            for (const auto& bmp : bumps) {
                edges.push_back(std::clamp(bmp.support_lo(), u0, u1));
                edges.push_back(std::clamp(bmp.support_hi(), u0, u1));
            }
            edges.push_back(u1);
            auto is_support_edge = [&](double x) {
                return std::any_of(bumps.begin(), bumps.end(), [&](const BumpSpec& bb) {
                    return x == bb.support_lo() || x == bb.support_hi();
                });
            };
            // Panels grade geometrically into any support endpoint they touch,
            // matching the source clustering at those non-analytic points.
            // The grading must continue until panels are smaller than the
            // source-offset floor of the adjacent bump (~0.009 half_width),
            // otherwise the nodes next to the endpoint leave a gap wider than
            // the nearest sources sit from the boundary and the residual can
            // spike unseen between them. Depth therefore adapts to the span
            // and the bump scale instead of being a fixed level count.
            const double ratio = 0.7;
            auto width_at = [&](double x) {
                for (const auto& bb : bumps)
                    if (x == bb.support_lo() || x == bb.support_hi()) return bb.half_width;
                return 0.0;
            };
            auto levels_for = [&](double span, double w) {
                if (!(span > 0) || !(w > 0)) return 14;
                double need = std::log(0.005 * w / span) / std::log(ratio);
                return std::clamp(static_cast<int>(std::ceil(need)), 14, 48);
            };
            for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
                double a = edges[e], b = edges[e + 1];
                if (b - a < 1e-14) continue;
                double mid = 0.5 * (a + b);
                double bump_w = 0;
                for (const auto& bb : bumps)
                    if (mid > bb.support_lo() && mid < bb.support_hi()) bump_w = bb.half_width;
                bool in_bump = bump_w > 0;
                bool grade_a = is_support_edge(a), grade_b = is_support_edge(b);
                std::vector<double> sub{a, b};
                if (grade_a || grade_b) {
                    double m = 0.5 * (a + b);
                    int la = levels_for(m - a, width_at(a));
                    int lb = levels_for(b - m, width_at(b));
                    double step_a = 1.0, step_b = 1.0;
                    for (int j = 0; j < std::max(la, lb); ++j) {
                        step_a *= ratio;
                        step_b *= ratio;
                        if (grade_a && j < la) sub.push_back(a + (m - a) * step_a);
                        if (grade_b && j < lb) sub.push_back(b - (b - m) * step_b);
                    }
                    if (grade_a && grade_b) sub.push_back(m);
                    std::sort(sub.begin(), sub.end());
                }
                // Inside a bump the panel length is capped by the bump width
                // so the node spacing stays below the local source offsets.
                double t = in_bump ? std::min(target / 4, bump_w / 6) : target;
                for (std::size_t q = 0; q + 1 < sub.size(); ++q) {
                    int np = std::max(1, static_cast<int>(std::ceil((sub[q + 1] - sub[q]) / t)));
                    add_panels(out, sub[q], sub[q + 1], np,
                               [&](double u) { return eval_node(pc, u); });
                }
            }
        } else {
            // Arc or fillet: uniform panels in the local parameter.
            double mid = 0.5 * (u0 + u1);
            double len = (u1 - u0) * piece.speed(mid); // rough
            int np = std::max(2, static_cast<int>(std::ceil(len / target)));
            add_panels(out, u0, u1, np, [&](double u) { return eval_node(pc, u); });
        }
    }
    return out;
}

} // namespace isolab

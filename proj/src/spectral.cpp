#include "isolab/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "isolab/errors.hpp"
#include "isolab/parallel.hpp"

namespace isolab {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = 0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
            }
            pp = n * (z * p0 - p1) / (z * z - 1);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1 - z * z) * pp * pp);
    }
}

struct MfsWorkspace {
    std::vector<Vec2> sources;
    std::vector<Shape::BNode> col; // boundary collocation nodes
    std::vector<double> row_scale; // sqrt of relative quadrature weight
    std::vector<Vec2> interior;
};

std::vector<Vec2> place_sources(const Shape& shape, const MfsOptions& opt) {
    auto sites = shape.source_sites(opt.n_src);
    std::vector<Vec2> src;
    src.reserve(sites.size());
    for (const auto& st : sites) {
        double dj = opt.offset_factor * st.scale;
        Vec2 p = st.pos + dj * st.normal;
        for (int tries = 0; tries < 40 && shape.inside(p, 0); ++tries) {
            dj *= 0.5;
            p = st.pos + dj * st.normal;
        }
        if (shape.inside(p, 0)) throw IllConditioned("source placement failed");
        src.push_back(p);
    }
    // The emitted site count is geometry-driven and can far exceed the
    // requested budget; an explicit cap thins the march uniformly in index,
    // preserving the relative grading. Used for the cheap scan bases.
    if (opt.max_src > 0 && static_cast<int>(src.size()) > opt.max_src) {
        std::vector<Vec2> kept;
        kept.reserve(opt.max_src);
        double stride = static_cast<double>(src.size()) / opt.max_src;
        for (int i = 0; i < opt.max_src; ++i)
            kept.push_back(src[static_cast<std::size_t>(i * stride)]);
        src = std::move(kept);
    }
    return src;
}

MfsWorkspace build_workspace(const Shape& shape, const MfsOptions& opt) {
    MfsWorkspace ws;
    ws.sources = place_sources(shape, opt);
    int n_col = opt.n_col > 0 ? opt.n_col
                              : static_cast<int>(2.5 * static_cast<double>(opt.n_src));
    ws.col = shape.boundary_nodes(n_col);
    // Collocation rows are unweighted: the singular value then measures the
    // worst-case pointwise boundary values, so refined panels near boundary
    // features are enforced as strictly as everything else.
    ws.row_scale.assign(ws.col.size(), 1.0);

    // Interior regularization points: boundary nodes pulled inward. This is
    // deterministic and reflection-covariant, so mirrored domains produce
    // exactly mirrored linear systems.
    int n_int = opt.n_int > 0 ? opt.n_int : std::max(16, opt.n_src / 6);
    double d = opt.offset_factor * std::min(shape.diameter(), shape.feature_scale());
    int stride = std::max<int>(1, static_cast<int>(ws.col.size()) / n_int);
    for (std::size_t i = 0; i + 1 < ws.col.size(); i += stride) {
        double pull = 2.0 * d;
        Vec2 p = ws.col[i].pos - pull * ws.col[i].normal;
        for (int tries = 0; tries < 20 && !shape.inside(p, 0.05 * pull); ++tries) {
            pull *= 0.5;
            p = ws.col[i].pos - pull * ws.col[i].normal;
        }
        if (shape.inside(p, 0)) ws.interior.push_back(p);
    }
    if (ws.interior.size() < 8) throw IllConditioned("interior point placement failed");
    return ws;
}

IndicatorState indicator_core(const MfsWorkspace& ws, double k, bool want_coeffs) {
    const int nb = static_cast<int>(ws.col.size());
    const int ni = static_cast<int>(ws.interior.size());
    const int ns = static_cast<int>(ws.sources.size());
    Eigen::MatrixXd m(nb + ni, ns);
    for (int j = 0; j < ns; ++j) {
        const Vec2& src = ws.sources[j];
        for (int i = 0; i < nb; ++i)
            m(i, j) = ws.row_scale[i] * ::y0(k * (ws.col[i].pos - src).norm());
        for (int i = 0; i < ni; ++i)
            m(nb + i, j) = ::y0(k * (ws.interior[i] - src).norm());
    }
    Eigen::VectorXd col_norm(ns);
    for (int j = 0; j < ns; ++j) {
        col_norm(j) = m.col(j).norm();
        if (!(col_norm(j) > 1e-300) || !std::isfinite(col_norm(j)))
            throw IllConditioned("degenerate basis column");
        m.col(j) /= col_norm(j);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    const int rank = static_cast<int>(qr.rank());
    if (rank == 0) throw IllConditioned("zero-rank collocation matrix");
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(nb + ni, rank);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(q.topRows(nb),
                                       want_coeffs ? Eigen::ComputeThinV : 0);
    const auto& sig = svd.singularValues();
    IndicatorState st;
    st.value = sig(rank - 1);
    st.second = rank >= 2 ? sig(rank - 2) : 1.0;
    st.basis.k = k;
    if (want_coeffs) {
        Eigen::VectorXd v = svd.matrixV().col(rank - 1);
        Eigen::VectorXd y = qr.matrixR()
                                .topLeftCorner(rank, rank)
                                .triangularView<Eigen::Upper>()
                                .solve(v);
        Eigen::VectorXd full = Eigen::VectorXd::Zero(ns);
        full.head(rank) = y;
        Eigen::VectorXd c = qr.colsPermutation() * full;
        st.coeffs.resize(ns);
        for (int j = 0; j < ns; ++j) st.coeffs[j] = c(j) / col_norm(j);
        st.basis.sources = ws.sources;
    }
    return st;
}

} // namespace

double HelmholtzBasis::eval(const Vec2& p, int j) const {
    return ::y0(k * (p - sources[j]).norm());
}

Vec2 HelmholtzBasis::grad(const Vec2& p, int j) const {
    Vec2 d = p - sources[j];
    double r = d.norm();
    return (-k * ::y1(k * r) / r) * d;
}

HelmholtzBasis make_basis(const Shape& shape, double k, const MfsOptions& opt) {
    HelmholtzBasis b;
    b.k = k;
    b.sources = place_sources(shape, opt);
    return b;
}

double indicator(const Shape& shape, double k, const MfsOptions& opt) {
    auto ws = build_workspace(shape, opt);
    return indicator_core(ws, k, false).value;
}

IndicatorState indicator_full(const Shape& shape, double k, const MfsOptions& opt) {
    auto ws = build_workspace(shape, opt);
    return indicator_core(ws, k, true);
}

std::vector<double> indicator_sweep(const Shape& shape, const std::vector<double>& ks,
                                    const MfsOptions& opt, bool serial_reference) {
    auto ws = build_workspace(shape, opt);
    std::vector<double> out(ks.size());
    if (serial_reference) {
        for (std::size_t i = 0; i < ks.size(); ++i)
            out[i] = indicator_core(ws, ks[i], false).value;
        return out;
    }
    apply_thread_cap();
    const auto n = static_cast<std::ptrdiff_t>(ks.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[i] = indicator_core(ws, ks[i], false).value;
    return out;
}

double EigenPair::eval(const Vec2& p) const {
    double acc = 0;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
        acc += coeffs[j] * ::y0(k * (p - basis.sources[j]).norm());
    return acc;
}

double eval_eigenfunction(const EigenPair& pair, const Vec2& p) {
    if (!pair.shape->inside(p, -1e-9 * pair.shape->diameter()))
        throw OutsideDomain("evaluation point outside the domain closure");
    return pair.eval(p);
}

EigenPair reflect_eigenpair(const EigenPair& pair,
                            std::shared_ptr<const Shape> mirrored_shape) {
    EigenPair out = pair;
    out.shape = std::move(mirrored_shape);
    for (auto& s : out.basis.sources) s.x() = -s.x();
    return out;
}

void eval_eigenfunction_batch(const EigenPair& pair, const std::vector<Vec2>& pts,
                              std::vector<double>& out, bool serial_reference) {
    out.resize(pts.size());
    const auto n = static_cast<std::ptrdiff_t>(pts.size());
    if (serial_reference) {
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = pair.eval(pts[i]);
        return;
    }
    apply_thread_cap();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = pair.eval(pts[i]);
}

namespace {

// Shared strip walker: x-panels uniform with geometric end grading, Gauss in
// x and y. Calls sink(point, weight) in a deterministic order.
template <class Sink>
void strip_points(const Shape& shape, int n_panels_x, int n_gauss_y, const Sink& sink) {
    std::vector<double> gx, gw, gy, gyw;
    gauss_legendre(12, gx, gw);
    gauss_legendre(n_gauss_y, gy, gyw);

    double x0 = shape.x_min(), x1 = shape.x_max();
    double w = (x1 - x0) / n_panels_x;
    std::vector<double> edges;
    // Left end: geometric grading toward x0 inside the first uniform panel.
    for (int j = 12; j >= 1; --j) edges.push_back(x0 + w * std::pow(0.5, j));
    edges.insert(edges.begin(), x0);
    for (int p = 1; p < n_panels_x - 1; ++p) edges.push_back(x0 + w * (p + 1));
    for (int j = 1; j <= 12; ++j) edges.push_back(x1 - w * std::pow(0.5, j));
    edges.push_back(x1);

    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        double xm = 0.5 * (edges[e] + edges[e + 1]);
        double xh = 0.5 * (edges[e + 1] - edges[e]);
        if (xh <= 0) continue;
        for (std::size_t i = 0; i < gx.size(); ++i) {
            double x = xm + xh * gx[i];
            double ylo, yhi;
            if (!shape.vertical_slice(x, ylo, yhi) || yhi <= ylo) continue;
            double ym = 0.5 * (ylo + yhi), yh = 0.5 * (yhi - ylo);
            for (int q = 0; q < n_gauss_y; ++q)
                sink(Vec2{x, ym + yh * gy[q]}, xh * gw[i] * yh * gyw[q]);
        }
    }
}

} // namespace

double integrate_psi2_strips(const EigenPair& pair, int n_panels_x, int n_gauss_y) {
    std::vector<Vec2> pts;
    std::vector<double> wts;
    strip_points(*pair.shape, n_panels_x, n_gauss_y, [&](const Vec2& p, double w) {
        pts.push_back(p);
        wts.push_back(w);
    });
    std::vector<double> psi;
    eval_eigenfunction_batch(pair, pts, psi);
    double acc = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) acc += wts[i] * psi[i] * psi[i];
    return acc;
}

double integrate_psi2_grid(const EigenPair& pair, double h) {
    const Shape& shape = *pair.shape;
    if (!(h > 0) || h > 0.02 * shape.diameter())
        throw std::invalid_argument("grid step too large for the quadrature");
    std::vector<Vec2> pts;
    std::vector<double> wts;
    double x0 = shape.x_min(), x1 = shape.x_max();
    for (double x = x0 + 0.5 * h; x < x1; x += h) {
        double ylo, yhi;
        if (!shape.vertical_slice(x, ylo, yhi) || yhi <= ylo) continue;
        int m = std::max(4, 2 * static_cast<int>(std::ceil((yhi - ylo) / (2 * h))));
        double dy = (yhi - ylo) / m;
        for (int j = 0; j <= m; ++j) {
            double c = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            pts.push_back({x, ylo + j * dy});
            wts.push_back(h * dy / 3.0 * c);
        }
    }
    std::vector<double> psi;
    eval_eigenfunction_batch(pair, pts, psi);
    double acc = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) acc += wts[i] * psi[i] * psi[i];
    return acc;
}

double BoundaryTrace::dnu_at_bottom(double x) const {
    const EigenPair& p = *pair;
    double acc = 0;
    Vec2 pos{x, 0};
    for (std::size_t j = 0; j < p.coeffs.size(); ++j)
        acc += p.coeffs[j] * p.basis.grad(pos, j).y();
    return -acc; // outward normal (0, -1)
}

BoundaryTrace normal_trace(std::shared_ptr<const EigenPair> pair, int n_nodes) {
    if (n_nodes < 64)
        throw std::invalid_argument("normal_trace needs at least 64 nodes");
    BoundaryTrace tr;
    tr.pair = pair;
    auto nodes = pair->shape->boundary_nodes(n_nodes);
    tr.nodes.reserve(nodes.size());
    for (const auto& nd : nodes) {
        double d = 0;
        for (std::size_t j = 0; j < pair->coeffs.size(); ++j)
            d += pair->coeffs[j] * pair->basis.grad(nd.pos, j).dot(nd.normal);
        tr.nodes.push_back({nd.s, nd.pos, nd.normal, d, nd.weight});
    }
    return tr;
}

double rellich_integral(const BoundaryTrace& trace) {
    double acc = 0;
    for (const auto& nd : trace.nodes)
        acc += nd.weight * nd.dpsi_dnu * nd.dpsi_dnu * nd.pos.dot(nd.normal);
    return acc;
}

FindEigsResult find_eigs(std::shared_ptr<const Shape> shape, double k_min, double k_max,
                         int n_scan, const MfsOptions& opt) {
    if (!(k_min > 0) || !(k_max > k_min) || n_scan < 3)
        throw std::invalid_argument("bad scan range");
    FindEigsResult result;
    auto ws = build_workspace(*shape, opt);
    // The scan and the first bisection stage only need to locate the dip, not
    // resolve its bottom, so they run on a half-size basis; its indicator
    // floor (~1e-4) is far below the detection threshold and pins the dip
    // position to ~1e-5 in k, where the full basis takes over.
    MfsOptions scan_opt = opt;
    scan_opt.n_src = std::max(80, opt.n_src / 3);
    scan_opt.n_col = 0;
    scan_opt.n_int = 0;
    const bool two_stage = scan_opt.n_src < opt.n_src;
    auto ws_scan = two_stage ? build_workspace(*shape, scan_opt) : ws;
    MfsOptions mid_opt = opt;
    mid_opt.n_src = std::max(scan_opt.n_src, 3 * opt.n_src / 4);
    mid_opt.n_col = 0;
    mid_opt.n_int = 0;
    const bool three_stage = two_stage && mid_opt.n_src < opt.n_src;
    auto ws_mid = three_stage ? build_workspace(*shape, mid_opt) : ws;

    std::vector<double> ks(n_scan);
    for (int i = 0; i < n_scan; ++i)
        ks[i] = k_min + (k_max - k_min) * i / (n_scan - 1);
    std::vector<double> vals(n_scan);
    {
        apply_thread_cap();
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n_scan; ++i)
            vals[i] = indicator_core(ws_scan, ks[i], false).value;
    }

    std::vector<int> minima;
    for (int i = 1; i + 1 < n_scan; ++i)
        if (vals[i] < opt.minimum_threshold && vals[i] <= vals[i - 1] &&
            vals[i] < vals[i + 1])
            minima.push_back(i);
    if (n_scan >= 2 && vals[0] < opt.minimum_threshold && vals[0] < vals[1])
        result.warnings.push_back("indicator already low at the scan start; an "
                                  "eigenvalue may sit below k_min");
    for (std::size_t m = 1; m < minima.size(); ++m)
        if (minima[m] - minima[m - 1] < 3)
            result.warnings.push_back(
                "two indicator minima within three scan steps near k = " +
                std::to_string(ks[minima[m]]) +
                "; an eigenvalue may be unresolved, rerun with a finer scan");

    const double gr = (std::sqrt(5.0) - 1) / 2;
    std::vector<Shape::BNode> res_nodes; // built lazily, shared across dips
    auto golden = [&](const MfsWorkspace& w, double& lo, double& hi, double tol) {
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = indicator_core(w, x1, false).value;
        double f2 = indicator_core(w, x2, false).value;
        while (hi - lo > tol) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = indicator_core(w, x1, false).value;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = indicator_core(w, x2, false).value;
            }
        }
    };
    for (int idx : minima) {
        double lo = ks[idx - 1], hi = ks[idx + 1];
        if (two_stage && hi - lo > 1e-4) {
            // The reduced-basis dip tracks the full-basis one to well below
            // 1e-8 in k (the eigenvalue shift between basis sizes is ~1e-9),
            // so nearly all of the refinement can run on the cheap basis;
            // the full basis only polishes a +/- 5e-8 bracket.
            golden(ws_scan, lo, hi, 1e-7);
            double c = 0.5 * (lo + hi);
            lo = c - 5e-8;
            hi = c + 5e-8;
            if (three_stage) {
                golden(ws_mid, lo, hi, 1e-9);
                c = 0.5 * (lo + hi);
                lo = c - 1e-9;
                hi = c + 1e-9;
            }
        }
        golden(ws, lo, hi, 1e-10);
        double kstar = 0.5 * (lo + hi);
        IndicatorState st = indicator_core(ws, kstar, true);
        if (st.value >= opt.minimum_threshold) continue; // dip did not survive

        EigenPair pair;
        pair.k = kstar;
        pair.lambda = kstar * kstar;
        pair.basis = st.basis;
        pair.coeffs = st.coeffs;
        pair.indicator_value = st.value;
        pair.second_singular_value = st.second;
        pair.shape = shape;

        double norm2 = integrate_psi2_strips(pair);
        if (!(norm2 > 0)) throw IllConditioned("vanishing trial eigenfunction");
        double scale = 1.0 / std::sqrt(norm2);
        for (auto& c : pair.coeffs) c *= scale;

        // Deterministic sign: orient so the interior value of largest
        // magnitude is positive; makes the ground state positive inside.
        double extreme = 0;
        for (const Vec2& p : ws.interior) {
            double v = eval_eigenfunction(pair, p);
            if (std::abs(v) > std::abs(extreme)) extreme = v;
        }
        if (extreme < 0)
            for (auto& c : pair.coeffs) c = -c;

        // Pointwise boundary residual, relative to the interior RMS value
        // 1/sqrt(area). The node set must be dense enough to resolve spikes
        // of the width of the smallest source offset: a trial combination can
        // be tiny at every collocation node yet huge between them, producing
        // a convincing spurious indicator dip, so the check needs finer
        // spacing than the collocation grid everywhere.
        double area = 0;
        strip_points(*shape, 120, 8, [&](const Vec2&, double w) { area += w; });
        if (res_nodes.empty()) {
            double per = 0;
            for (const auto& nd : ws.col) per += nd.weight;
            double min_scale = std::numeric_limits<double>::max();
            for (const auto& site : shape->source_sites(opt.n_src))
                min_scale = std::min(min_scale, site.scale);
            double spacing = 0.25 * opt.offset_factor * min_scale;
            int n_res = 2 * (opt.n_col > 0 ? opt.n_col
                                           : static_cast<int>(2.5 * opt.n_src));
            n_res = std::max(n_res, static_cast<int>(1.5 * per / spacing));
            res_nodes = shape->boundary_nodes(std::min(n_res, 120000));
        }
        std::vector<Vec2> res_pts(res_nodes.size());
        for (std::size_t i = 0; i < res_nodes.size(); ++i) res_pts[i] = res_nodes[i].pos;
        std::vector<double> res_vals;
        eval_eigenfunction_batch(pair, res_pts, res_vals);
        double max_psi = 0;
        for (double v : res_vals) max_psi = std::max(max_psi, std::abs(v));
        pair.boundary_residual = max_psi * std::sqrt(area);
        if (pair.boundary_residual > 0.1) {
            result.warnings.push_back(
                "indicator dip at k = " + std::to_string(kstar) +
                " rejected: dense boundary residual " +
                std::to_string(pair.boundary_residual) +
                " reveals a spurious trial mode");
            continue;
        }
        double bracket_term = 2 * kstar * (hi - lo);
        pair.error_bar = std::max(pair.lambda * pair.boundary_residual, bracket_term);

        result.pairs.push_back(std::move(pair));
    }
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const EigenPair& x, const EigenPair& y) { return x.k < y.k; });
    return result;
}

} // namespace isolab

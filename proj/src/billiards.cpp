#include "isolab/billiards.hpp"

#include <algorithm>
#include <cmath>
#include <Eigen/Dense>

#include "isolab/parallel.hpp"
#include "isolab/rng.hpp"

namespace isolab {

const char* crossing_name(CrossingClass c) {
    switch (c) {
        case CrossingClass::FocalCrossing: return "focal-crossing";
        case CrossingClass::Outer: return "outer";
        case CrossingClass::Separatrix: return "separatrix";
    }
    return "?";
}

double caustic_parameter(const EllipseSpec& e, const Vec2& p, const Vec2& q) {
    const Vec2 v = q - p;
    if (v.norm() == 0) throw std::invalid_argument("caustic_parameter: degenerate chord");
    // Supporting line u x + v y = w of the chord.
    const double lu = -v.y(), lv = v.x();
    const double lw = lu * p.x() + lv * p.y();
    return (e.a * e.a * lu * lu + e.b * e.b * lv * lv - lw * lw) / (lu * lu + lv * lv);
}

CrossingClass classify_mu(const EllipseSpec& e, double mu, double tol) {
    const double b2 = e.b * e.b;
    if (mu > b2 + tol) return CrossingClass::FocalCrossing;
    if (mu < b2 - tol) return CrossingClass::Outer;
    return CrossingClass::Separatrix;
}

namespace {

constexpr double kMinAdvance = 1e-10;  // minimum ray parameter of a hit
constexpr double kTangencyTol = 1e-6;  // angular tolerance from tangency

// Root of f(u) = cross(dir, pos(u)-origin) inside [ua, ub], secant with
// bisection safeguard. fa, fb have opposite signs.
double polish_crossing(const Piece& piece, const Ray& ray, double ua, double ub,
                       double fa, double fb) {
    auto f = [&](double u) {
        const Vec2 r = piece.position(u) - ray.origin;
        return ray.direction.x() * r.y() - ray.direction.y() * r.x();
    };
    for (int it = 0; it < 120; ++it) {
        double um;
        if (fb != fa) {
            um = ub - fb * (ub - ua) / (fb - fa);
            if (!(um > std::min(ua, ub) && um < std::max(ua, ub)))
                um = 0.5 * (ua + ub);
        } else {
            um = 0.5 * (ua + ub);
        }
        const double fm = f(um);
        if (fm == 0) return um;
        if ((fm > 0) == (fa > 0)) {
            ua = um;
            fa = fm;
        } else {
            ub = um;
            fb = fm;
        }
        if (std::abs(ub - ua) < 1e-15 * (1.0 + std::abs(ua) + std::abs(ub))) break;
    }
    return 0.5 * (ua + ub);
}

} // namespace

Bounce step(const Boundary& boundary, const EllipseSpec& base, const Ray& ray) {
    const Vec2 o = ray.origin;
    const Vec2 d = ray.direction.normalized();

    const auto& samples = boundary.bracket_samples();
    double best_t = std::numeric_limits<double>::infinity();
    int best_piece = -1;
    double best_u = 0;

    auto consider = [&](int piece, double u) {
        const Vec2 pos = boundary.piece(piece).position(u);
        const double t = (pos - o).dot(d);
        if (t > kMinAdvance && t < best_t) {
            best_t = t;
            best_piece = piece;
            best_u = u;
        }
    };

    double f_prev = 0;
    int piece_prev = -1;
    double u_prev = 0;
    for (const auto& sm : samples) {
        const Vec2 r = sm.pos - o;
        const double f = d.x() * r.y() - d.y() * r.x();
        if (sm.piece == piece_prev) {
            if (f == 0) {
                consider(sm.piece, sm.u);
            } else if (f_prev != 0 && (f > 0) != (f_prev > 0)) {
                const double u = polish_crossing(boundary.piece(sm.piece), {o, d},
                                                 u_prev, sm.u, f_prev, f);
                consider(sm.piece, u);
            }
        } else if (f == 0) {
            consider(sm.piece, sm.u);
        }
        piece_prev = sm.piece;
        u_prev = sm.u;
        f_prev = f;
    }

    if (best_piece < 0)
        throw GrazingOrCorner("no forward boundary intersection found");

    const BoundaryPoint bp = boundary.eval_local(best_piece, best_u);
    for (const auto& c : boundary.corners()) {
        if ((bp.position - c).norm() < 1e-6 * base.a)
            throw GrazingOrCorner("hit inside a corner exclusion disk");
    }
    const double dn = d.dot(bp.normal);
    if (std::abs(dn) < kTangencyTol)
        throw GrazingOrCorner("hit within tangency tolerance");

    Bounce b;
    b.s = bp.s;
    b.position = bp.position;
    b.incoming = d;
    b.outgoing = (d - 2.0 * dn * bp.normal).normalized();
    b.mu = caustic_parameter(base, o, bp.position);
    b.zone = boundary.zone_local(best_piece, best_u);
    return b;
}

Trajectory trace(const Boundary& boundary, const EllipseSpec& base, const Ray& ray,
                 int n_bounces) {
    if (n_bounces < 1) throw std::invalid_argument("trace: n_bounces >= 1 required");
    Trajectory traj;
    Ray cur{ray.origin, ray.direction.normalized()};
    for (int i = 0; i < n_bounces; ++i) {
        try {
            Bounce b = step(boundary, base, cur);
            cur = Ray{b.position, b.outgoing};
            traj.bounces.push_back(std::move(b));
        } catch (const GrazingOrCorner&) {
            traj.abandoned = true;
            break;
        }
    }
    return traj;
}

namespace {

struct Bbox {
    double x0, x1, y0, y1;
};

Bbox sample_bbox(const Boundary& boundary) {
    Bbox b{1e300, -1e300, 1e300, -1e300};
    for (const auto& sm : boundary.bracket_samples()) {
        b.x0 = std::min(b.x0, sm.pos.x());
        b.x1 = std::max(b.x1, sm.pos.x());
        b.y0 = std::min(b.y0, sm.pos.y());
        b.y1 = std::max(b.y1, sm.pos.y());
    }
    return b;
}

struct TrajSummary {
    bool abandoned = false;
    bool saw_m = false;
    bool saw_b = false;
};

TrajSummary run_one_trajectory(const Boundary& boundary, const EllipseSpec& base,
                               const Bbox& box, int n_bounces, std::uint64_t sub) {
    std::mt19937_64 rng(sub);
    std::uniform_real_distribution<double> ux(box.x0, box.x1), uy(box.y0, box.y1),
        uang(0.0, 2 * M_PI);
    Vec2 origin;
    do {
        origin = Vec2{ux(rng), uy(rng)};
    } while (!boundary.inside(origin));
    const double ang = uang(rng);
    const Trajectory t =
        trace(boundary, base, {origin, Vec2{std::cos(ang), std::sin(ang)}}, n_bounces);
    TrajSummary s;
    s.abandoned = t.abandoned;
    for (const auto& b : t.bounces) {
        if (b.zone == Zone::BumpM) s.saw_m = true;
        if (b.zone == Zone::BumpB) s.saw_b = true;
    }
    return s;
}

} // namespace

DichotomyReport dichotomy_check_domain(const Boundary& boundary, const EllipseSpec& base,
                                       int n_traj, int n_bounces, std::uint64_t seed,
                                       bool serial_reference) {
    DichotomyReport rep;
    rep.n_traj = n_traj;
    rep.n_bounces = n_bounces;
    rep.seed = seed;
    if (n_traj <= 0) return rep;

    const Bbox box = sample_bbox(boundary);
    std::vector<TrajSummary> out(n_traj);
    if (serial_reference) {
        for (int i = 0; i < n_traj; ++i)
            out[i] = run_one_trajectory(boundary, base, box, n_bounces, subseed(seed, i));
    } else {
#pragma omp parallel for schedule(dynamic, 4)
        for (int i = 0; i < n_traj; ++i)
            out[i] = run_one_trajectory(boundary, base, box, n_bounces, subseed(seed, i));
    }
    for (const auto& s : out) {
        if (s.abandoned) {
            ++rep.abandoned;
            continue;
        }
        if (s.saw_m && s.saw_b) ++rep.violations;
        else if (s.saw_m) ++rep.visited_m_only;
        else if (s.saw_b) ++rep.visited_b_only;
        else ++rep.visited_neither;
    }
    return rep;
}

DichotomyReport dichotomy_check(const MushroomPair& pair, int n_traj, int n_bounces,
                                std::uint64_t seed) {
    const EllipseSpec& e = pair.omega1.ellipse();
    DichotomyReport r1 = dichotomy_check_domain(pair.omega1.boundary(), e, n_traj,
                                                n_bounces, subseed(seed, 1));
    DichotomyReport r2 = dichotomy_check_domain(pair.omega2.boundary(), e, n_traj,
                                                n_bounces, subseed(seed, 2));
    DichotomyReport rep;
    rep.n_traj = 2 * n_traj;
    rep.n_bounces = n_bounces;
    rep.seed = seed;
    rep.violations = r1.violations + r2.violations;
    rep.abandoned = r1.abandoned + r2.abandoned;
    rep.visited_m_only = r1.visited_m_only + r2.visited_m_only;
    rep.visited_b_only = r1.visited_b_only + r2.visited_b_only;
    rep.visited_neither = r1.visited_neither + r2.visited_neither;
    return rep;
}

// --------------------------------------------------------- orbit search

double orbit_length(const Boundary& boundary, const std::vector<double>& params) {
    const int n = static_cast<int>(params.size());
    double acc = 0;
    for (int i = 0; i < n; ++i) {
        const Vec2 p = boundary.eval(params[i]).position;
        const Vec2 q = boundary.eval(params[(i + 1) % n]).position;
        acc += (q - p).norm();
    }
    return acc;
}

std::vector<double> length_gradient(const Boundary& boundary,
                                    const std::vector<double>& params) {
    const int n = static_cast<int>(params.size());
    std::vector<BoundaryPoint> bp(n);
    for (int i = 0; i < n; ++i) bp[i] = boundary.eval(params[i]);
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        const Vec2& pi = bp[i].position;
        const Vec2 to_prev = pi - bp[(i + n - 1) % n].position;
        const Vec2 to_next = pi - bp[(i + 1) % n].position;
        const double lp = to_prev.norm(), ln = to_next.norm();
        if (lp == 0 || ln == 0) {
            g[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        g[i] = bp[i].tangent.dot(to_prev / lp + to_next / ln);
    }
    return g;
}

namespace {

double sup_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// One component of grad L; needs only three boundary evaluations.
double length_partial(const Boundary& boundary, const std::vector<double>& s, int i) {
    const int n = static_cast<int>(s.size());
    const BoundaryPoint bi = boundary.eval(s[i]);
    const Vec2 to_prev = bi.position - boundary.eval(s[(i + n - 1) % n]).position;
    const Vec2 to_next = bi.position - boundary.eval(s[(i + 1) % n]).position;
    const double lp = to_prev.norm(), ln = to_next.norm();
    if (lp == 0 || ln == 0) return std::numeric_limits<double>::quiet_NaN();
    return bi.tangent.dot(to_prev / lp + to_next / ln);
}

// Cyclic one-dimensional Newton sweeps on each dL/ds_i in turn.  Critical
// points of L are saddles, so descent on L cannot reach them, and full
// Newton from a random tuple rarely lands in a basin; relaxing one vertex
// at a time tracks the ridge structure and delivers most starts close
// enough for the final solve to finish.
void coordinate_polish(const Boundary& boundary, std::vector<double>& s) {
    const int n = static_cast<int>(s.size());
    const double P = boundary.perimeter();
    const double h = 1e-6, cap = P / 20;
    for (int sweep = 0; sweep < 40; ++sweep) {
        double moved = 0;
        for (int i = 0; i < n; ++i) {
            const double f = length_partial(boundary, s, i);
            std::vector<double> sp = s, sm = s;
            sp[i] += h;
            sm[i] -= h;
            const double fp = length_partial(boundary, sp, i);
            const double fm = length_partial(boundary, sm, i);
            const double fd = (fp - fm) / (2 * h);
            if (!std::isfinite(f) || !std::isfinite(fd) || fd == 0) continue;
            const double dt = std::clamp(-f / fd, -cap, cap);
            s[i] += dt;
            moved = std::max(moved, std::abs(dt));
        }
        if (moved < 1e-10) break;
    }
}

// Levenberg-Marquardt on the critical-point system grad L = 0, minimizing
// |grad L|^2.  The orbits are saddles of L, so a descent method on L itself
// cannot find them; LM on the squared gradient has much larger basins than
// raw Newton and reduces to Newton (quadratic convergence) near a root.
bool solve_orbit(const Boundary& boundary, std::vector<double>& s) {
    const int n = static_cast<int>(s.size());
    const double kTol = 1e-12;
    double lambda = 1e-3;

    auto grad_at = [&](const std::vector<double>& p, Eigen::VectorXd& gv) {
        const auto g = length_gradient(boundary, p);
        for (double x : g)
            if (!std::isfinite(x)) return false;
        gv.resize(n);
        for (int i = 0; i < n; ++i) gv(i) = g[i];
        return true;
    };

    Eigen::VectorXd gv;
    if (!grad_at(s, gv)) return false;
    for (int iter = 0; iter < 200; ++iter) {
        if (gv.lpNorm<Eigen::Infinity>() <= kTol) return true;

        Eigen::MatrixXd J(n, n);
        const double h = 1e-7;
        for (int j = 0; j < n; ++j) {
            std::vector<double> sp = s, sm = s;
            sp[j] += h;
            sm[j] -= h;
            Eigen::VectorXd gp, gm;
            if (!grad_at(sp, gp) || !grad_at(sm, gm)) return false;
            J.col(j) = (gp - gm) / (2 * h);
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd Jtg = J.transpose() * gv;
        const double cost = gv.squaredNorm();

        bool accepted = false;
        for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += lambda;
            Eigen::VectorXd delta = A.ldlt().solve(-Jtg);
            if (!delta.allFinite()) {
                lambda *= 10;
                continue;
            }
            std::vector<double> s_new = s;
            for (int i = 0; i < n; ++i) s_new[i] += delta(i);
            Eigen::VectorXd g_new;
            if (grad_at(s_new, g_new) && g_new.squaredNorm() < cost) {
                s = std::move(s_new);
                gv = std::move(g_new);
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
            } else {
                lambda *= 10;
            }
        }
        if (!accepted) return false;
    }
    return false;
}

std::vector<double> canonical_params(std::vector<double> s, double perimeter) {
    const int n = static_cast<int>(s.size());
    for (auto& x : s) {
        x = std::fmod(x, perimeter);
        if (x < 0) x += perimeter;
    }
    auto rotate_to_min = [&](std::vector<double> v) {
        const int k = static_cast<int>(
            std::min_element(v.begin(), v.end()) - v.begin());
        std::rotate(v.begin(), v.begin() + k, v.end());
        return v;
    };
    std::vector<double> fwd = rotate_to_min(s);
    std::vector<double> rev = s;
    std::reverse(rev.begin(), rev.end());
    rev = rotate_to_min(rev);
    // lexicographically smaller traversal, with a tolerance on ties
    for (int i = 0; i < n; ++i) {
        if (fwd[i] < rev[i] - 1e-9) return fwd;
        if (rev[i] < fwd[i] - 1e-9) return rev;
    }
    return fwd;
}

struct OrbitCandidate {
    bool ok = false;
    PeriodicOrbit orbit;
};

OrbitCandidate validate_orbit(const Boundary& boundary, const EllipseSpec& base,
                              std::vector<double> s, double l_max) {
    OrbitCandidate out;
    const int n = static_cast<int>(s.size());
    const double P = boundary.perimeter();
    s = canonical_params(std::move(s), P);

    std::vector<BoundaryPoint> bp(n);
    for (int i = 0; i < n; ++i) bp[i] = boundary.eval(s[i]);

    // vertex distinctness and corner exclusion
    for (int i = 0; i < n; ++i) {
        const Vec2& pi = bp[i].position;
        if ((bp[(i + 1) % n].position - pi).norm() < 1e-8) return out;
        for (const auto& c : boundary.corners())
            if ((pi - c).norm() < 1e-6 * base.a) return out;
    }

    // repetition of a shorter orbit
    for (int p = 1; p < n; ++p) {
        if (n % p != 0) continue;
        bool rep = true;
        for (int i = 0; i < n && rep; ++i)
            if ((bp[i].position - bp[(i + p) % n].position).norm() > 1e-7) rep = false;
        if (rep) return out;
    }

    // chords must stay inside the closed domain
    for (int i = 0; i < n; ++i) {
        const Vec2& p0 = bp[i].position;
        const Vec2& p1 = bp[(i + 1) % n].position;
        for (int j = 1; j <= 24; ++j) {
            const Vec2 q = p0 + (p1 - p0) * (static_cast<double>(j) / 25.0);
            if (!boundary.inside(q, 1e-9)) return out;
        }
    }

    // reflection law, recomputed from incidence angles (not via grad L)
    double mu_max = -1e300, mu_min = 1e300;
    for (int i = 0; i < n; ++i) {
        const Vec2 u_in = (bp[i].position - bp[(i + n - 1) % n].position).normalized();
        const Vec2 u_out = (bp[(i + 1) % n].position - bp[i].position).normalized();
        const double ang_in = std::acos(std::clamp(-u_in.dot(bp[i].normal), -1.0, 1.0));
        const double ang_out = std::acos(std::clamp(u_out.dot(bp[i].normal), -1.0, 1.0));
        if (std::abs(ang_in - ang_out) > 1e-9) return out;
        const double mu = caustic_parameter(base, bp[(i + n - 1) % n].position,
                                            bp[i].position);
        mu_max = std::max(mu_max, mu);
        mu_min = std::min(mu_min, mu);
    }

    const double L = orbit_length(boundary, s);
    if (!(L > 1e-6) || L > l_max) return out;

    out.ok = true;
    out.orbit.n = n;
    out.orbit.params = s;
    out.orbit.vertices.resize(n);
    for (int i = 0; i < n; ++i) out.orbit.vertices[i] = bp[i].position;
    out.orbit.length = L;
    out.orbit.grad_residual = sup_norm(length_gradient(boundary, s));
    const double b2 = base.b * base.b;
    if (mu_max > b2 + 1e-9)
        out.orbit.crossing = CrossingClass::FocalCrossing;
    else if (mu_max < b2 - 1e-9)
        out.orbit.crossing = CrossingClass::Outer;
    else
        out.orbit.crossing = CrossingClass::Separatrix;
    return out;
}

bool same_orbit(const PeriodicOrbit& a, const PeriodicOrbit& b) {
    if (a.n != b.n) return false;
    if (std::abs(a.length - b.length) > 1e-9) return false;
    for (int i = 0; i < a.n; ++i)
        if (std::abs(a.params[i] - b.params[i]) > 1e-5) return false;
    return true;
}

} // namespace

OrbitSearchResult find_orbits(const Boundary& boundary, const EllipseSpec& base, int n,
                              double l_max, int n_starts, std::uint64_t seed,
                              bool serial_reference) {
    if (n < 2) throw std::invalid_argument("find_orbits: n >= 2 required");
    OrbitSearchResult res;
    if (n_starts <= 0 || l_max <= 0) return res;

    const double P = boundary.perimeter();
    std::vector<std::vector<OrbitCandidate>> found(n_starts);
    std::vector<char> converged(n_starts, 0);

    auto run_start = [&](int j) {
        std::mt19937_64 rng = make_rng(seed, j);
        std::uniform_real_distribution<double> us(0.0, P);
        std::vector<double> s(n);
        for (int i = 0; i < n; ++i) s[i] = us(rng);
        // Candidate tuples for this start: the raw random tuple, and for odd
        // starts the most nearly closed n-bounce windows of one traced random
        // trajectory (recurrence mining: the reflection law already holds at
        // interior window vertices, only closure is violated, which puts far
        // more candidates inside a basin than independent random vertices).
        std::vector<std::vector<double>> cands;
        if (j % 2 == 1) {
            std::uniform_real_distribution<double> ua(0.05, M_PI - 0.05);
            const BoundaryPoint b0 = boundary.eval(s[0]);
            const double th = ua(rng);
            Ray ray{b0.position,
                    std::cos(th) * b0.tangent - std::sin(th) * b0.normal};
            std::vector<Bounce> tr;
            try {
                for (int i = 0; i < 24 * n; ++i) {
                    tr.push_back(step(boundary, base, ray));
                    ray = {tr.back().position, tr.back().outgoing};
                }
            } catch (const GrazingOrCorner&) {
            }
            if (static_cast<int>(tr.size()) > n) {
                std::vector<std::pair<double, int>> windows;
                for (int i = 0; i + n < static_cast<int>(tr.size()); ++i) {
                    // windows that nearly close after a proper divisor of n
                    // would only converge to repetitions of shorter orbits
                    bool rep = false;
                    for (int p = 1; p < n && !rep; ++p)
                        if (n % p == 0 &&
                            (tr[i + p].position - tr[i].position).norm() < 0.05)
                            rep = true;
                    if (rep) continue;
                    windows.emplace_back((tr[i + n].position - tr[i].position).norm(), i);
                }
                std::sort(windows.begin(), windows.end());
                for (int w = 0; w < std::min<int>(16, windows.size()); ++w) {
                    std::vector<double> cs(n);
                    for (int i = 0; i < n; ++i) cs[i] = tr[windows[w].second + i].s;
                    cands.push_back(std::move(cs));
                }
            }
        }
        cands.push_back(s);
        // Alternate the sweep relaxation with the full solve: the sweeps are
        // not monotone in |grad L|^2 and hop out of the stationary points
        // where the full solve stalls.  Every candidate is solved to the end;
        // rare orbits would otherwise be shadowed by the common ones their
        // trajectory also passes near.
        for (auto& cand : cands) {
            bool done = false;
            for (int round = 0; round < 3 && !done; ++round) {
                coordinate_polish(boundary, cand);
                if (solve_orbit(boundary, cand)) {
                    converged[j] = 1;
                    done = true;
                    found[j].push_back(validate_orbit(boundary, base, cand, l_max));
                }
            }
        }
    };

    if (serial_reference) {
        for (int j = 0; j < n_starts; ++j) run_start(j);
    } else {
#pragma omp parallel for schedule(dynamic, 2)
        for (int j = 0; j < n_starts; ++j) run_start(j);
    }

    for (int j = 0; j < n_starts; ++j) {
        if (!converged[j]) {
            ++res.non_convergent;
            continue;
        }
        bool kept_any = false;
        for (const auto& cand : found[j]) {
            if (!cand.ok) continue;
            kept_any = true;
            bool dup = false;
            for (const auto& o : res.orbits)
                if (same_orbit(o, cand.orbit)) {
                    dup = true;
                    break;
                }
            if (!dup) res.orbits.push_back(cand.orbit);
        }
        if (!kept_any) ++res.rejected;
    }
    std::sort(res.orbits.begin(), res.orbits.end(),
              [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
                  return a.length < b.length;
              });
    return res;
}

LengthSpectrum length_spectrum(const Boundary& boundary, const EllipseSpec& base,
                               const SearchCaps& caps) {
    LengthSpectrum spec;
    spec.caps = caps;
    if (caps.l_max <= 0) return spec;
    for (int n = 2; n <= caps.n_max; ++n) {
        auto r = find_orbits(boundary, base, n, caps.l_max, caps.n_starts,
                             subseed(caps.seed, n));
        for (auto& o : r.orbits) spec.orbits.push_back(std::move(o));
    }
    std::sort(spec.orbits.begin(), spec.orbits.end(),
              [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
                  return a.length < b.length;
              });
    for (const auto& o : spec.orbits) {
        if (!spec.entries.empty() &&
            o.length - spec.entries.back().length <= spec.cluster_tol) {
            ++spec.entries.back().multiplicity;
        } else {
            spec.entries.push_back({o.length, 1});
        }
    }
    return spec;
}

SpectrumMatch compare_spectra(const LengthSpectrum& s1, const LengthSpectrum& s2,
                              double match_tol) {
    if (!(s1.caps == s2.caps))
        throw CapMismatch("compare_spectra: spectra computed with different caps");
    std::vector<double> l1, l2;
    for (const auto& e : s1.entries)
        for (int i = 0; i < e.multiplicity; ++i) l1.push_back(e.length);
    for (const auto& e : s2.entries)
        for (int i = 0; i < e.multiplicity; ++i) l2.push_back(e.length);

    SpectrumMatch m;
    std::size_t i = 0, j = 0;
    while (i < l1.size() && j < l2.size()) {
        const double gap = std::abs(l1[i] - l2[j]);
        if (gap <= match_tol) {
            m.max_gap = std::max(m.max_gap, gap);
            ++i;
            ++j;
        } else if (l1[i] < l2[j]) {
            ++m.unmatched_1;
            ++i;
        } else {
            ++m.unmatched_2;
            ++j;
        }
    }
    m.unmatched_1 += static_cast<int>(l1.size() - i);
    m.unmatched_2 += static_cast<int>(l2.size() - j);
    m.pass = (m.unmatched_1 == 0 && m.unmatched_2 == 0);
    return m;
}

} // namespace isolab

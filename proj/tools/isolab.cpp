// Command-line front end: parses a JSON run configuration, dispatches the
// experiments, and writes plot-ready CSV/JSON payloads plus a run report.
#include <CLI11.hpp>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>

#include "isolab/billiards.hpp"
#include "isolab/csv.hpp"
#include "isolab/geometry.hpp"
#include "isolab/parallel.hpp"
#include "isolab/perturbation.hpp"
#include "isolab/rng.hpp"
#include "isolab/spectral.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace isolab;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Ctx {
    json cfg;
    std::string out_dir = ".";
    std::string format = "csv";
    std::optional<std::uint64_t> seed_override;
    json report = json::object();
};

// Column-oriented payload table written as .csv (17 significant digits) or
// as a .json array of row objects, selected by --format.
class Table {
public:
    explicit Table(std::vector<std::string> cols) : cols_(std::move(cols)) {}

    Table& row(std::initializer_list<json> cells) {
        json r = json::object();
        std::size_t i = 0;
        for (const auto& c : cells) r[cols_.at(i++)] = c;
        rows_.push_back(std::move(r));
        return *this;
    }

    std::string write(const Ctx& ctx, const std::string& base) const {
        fs::path path = fs::path(ctx.out_dir) / (base + "." + ctx.format);
        if (ctx.format == "json") {
            std::ofstream out(path);
            if (!out) throw IoError("cannot open " + path.string());
            json doc = json::array();
            for (const auto& r : rows_) doc.push_back(r);
            out << doc.dump(2) << '\n';
        } else {
            CsvWriter w(path.string(), cols_);
            for (const auto& r : rows_) {
                for (const auto& c : cols_) {
                    const json& v = r.at(c);
                    if (v.is_number_float())
                        w.field(v.get<double>());
                    else if (v.is_number_integer())
                        w.field(static_cast<int>(v.get<long long>()));
                    else
                        w.field(v.get<std::string>());
                }
                w.end_row();
            }
        }
        return path.string();
    }

private:
    std::vector<std::string> cols_;
    std::vector<json> rows_;
};

void write_json_payload(const Ctx& ctx, const std::string& base, const json& doc) {
    fs::path path = fs::path(ctx.out_dir) / (base + ".json");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string());
    out << doc.dump(2) << '\n';
}

BumpSpec bump_from(const json& j) {
    return {j.at("center").get<double>(), j.at("half_width").get<double>(),
            j.at("depth").get<double>()};
}

std::vector<BumpSpec> bumps_from(const json& cfg, const char* key) {
    std::vector<BumpSpec> out;
    if (cfg.contains(key))
        for (const auto& j : cfg.at(key)) out.push_back(bump_from(j));
    return out;
}

MushroomPair pair_from(const json& cfg) {
    const auto& e = cfg.at("ellipse");
    EllipseSpec ell = build_ellipse(e.at("a").get<double>(), e.at("b").get<double>());
    return make_mushroom_pair(ell, bumps_from(cfg, "outer_bumps"),
                              bumps_from(cfg, "focal_bumps"),
                              cfg.value("corner_rounding", 0.0),
                              cfg.value("clearance", -1.0));
}

std::uint64_t required_seed(const Ctx& ctx, const char* block) {
    if (ctx.seed_override) return *ctx.seed_override;
    if (ctx.cfg.contains(block) && ctx.cfg.at(block).contains("seed"))
        return ctx.cfg.at(block).at("seed").get<std::uint64_t>();
    throw std::invalid_argument(std::string("seed required: set --seed or ") + block +
                                ".seed in the config (no wall-clock default)");
}

SearchCaps caps_from(const Ctx& ctx) {
    const json b = ctx.cfg.value("billiards", json::object());
    double a = ctx.cfg.at("ellipse").at("a").get<double>();
    return {b.value("L_max", 3.0 * a), b.value("n_max", 6), b.value("n_starts", 200),
            required_seed(ctx, "billiards")};
}

MfsOptions mfs_from(const Ctx& ctx) {
    const json s = ctx.cfg.value("spectral", json::object());
    MfsOptions opt;
    opt.n_src = s.value("n_src", 200);
    opt.n_col = s.value("n_col", 0);
    return opt;
}

GroundStateOptions gs_from(const Ctx& ctx) {
    GroundStateOptions opt;
    opt.mfs = mfs_from(ctx);
    return opt;
}

PerturbationSpec focal_perturbation(const Ctx& ctx, double eps) {
    return {bumps_from(ctx.cfg, "focal_bumps"), eps, false};
}

DomainSpec base_spec(const MushroomPair& pair) {
    DomainSpec base = pair.omega1.spec();
    base.focal_bumps.clear();
    return base;
}

json spectrum_json(const LengthSpectrum& ls) {
    json entries = json::array();
    for (const auto& e : ls.entries)
        entries.push_back({{"length", e.length}, {"multiplicity", e.multiplicity}});
    return entries;
}

void emit_spectrum(const Ctx& ctx, const std::string& base, const LengthSpectrum& ls) {
    Table t({"length", "multiplicity", "n", "class"});
    for (const auto& e : ls.entries) {
        const PeriodicOrbit* rep = nullptr;
        for (const auto& o : ls.orbits)
            if (std::abs(o.length - e.length) <= ls.cluster_tol && !rep) rep = &o;
        t.row({e.length, e.multiplicity, rep ? rep->n : 0,
               rep ? crossing_name(rep->crossing) : "unknown"});
    }
    t.write(ctx, base);
}

void emit_boundary(const Ctx& ctx, const std::string& base, const Boundary& bd) {
    Table t({"s", "x", "y"});
    for (int i = 0; i < 4096; ++i) {
        double s = bd.perimeter() * i / 4096.0;
        BoundaryPoint p = bd.eval(s);
        t.row({p.s, p.position.x(), p.position.y()});
    }
    t.write(ctx, base);
}

json certificate_json(const Certificate& c) {
    return {{"epsilon", c.epsilon},
            {"seed", c.seed},
            {"thresholds",
             {{"match_tol", c.thresholds.match_tol},
              {"safety_factor", c.thresholds.safety_factor}}},
            {"caps",
             {{"L_max", c.caps.l_max},
              {"n_max", c.caps.n_max},
              {"n_starts", c.caps.n_starts},
              {"seed", c.caps.seed}}},
            {"lambda1", c.lambda1},
            {"bar1", c.bar1},
            {"lambda2", c.lambda2},
            {"bar2", c.bar2},
            {"gap", std::abs(c.lambda1 - c.lambda2)},
            {"d1", c.d1},
            {"d2", c.d2},
            {"rate_error", c.rate_error},
            {"evenness_defect", c.defect},
            {"spectrum_max_gap", c.spectrum_max_gap},
            {"unmatched", c.match.unmatched_1 + c.match.unmatched_2},
            {"lengths_match", c.lengths_match},
            {"spectra_differ", c.spectra_differ},
            {"rates_differ", c.rates_differ},
            {"status", c.status == VerdictStatus::Pass ? "pass" : "inconclusive"},
            {"notes", c.notes}};
}

// ---- subcommand handlers; each returns the process exit code ----

int run_pair_make(Ctx& ctx) {
    MushroomPair pair = pair_from(ctx.cfg);
    emit_boundary(ctx, "boundary_omega1", pair.omega1.boundary());
    emit_boundary(ctx, "boundary_omega2", pair.omega2.boundary());
    json doc = {{"b_dual", pair.b_dual},
                {"m_self_dual", pair.m_self_dual},
                {"warnings", pair.warnings},
                {"perimeter_omega1", pair.omega1.boundary().perimeter()},
                {"perimeter_omega2", pair.omega2.boundary().perimeter()}};
    write_json_payload(ctx, "pair", doc);
    ctx.report["pair"] = doc;
    return 0;
}

int run_billiard_trace(Ctx& ctx) {
    MushroomPair pair = pair_from(ctx.cfg);
    const json b = ctx.cfg.value("billiards", json::object());
    int n_traj = b.value("n_traj", 4);
    int n_bounces = b.value("n_bounces", 200);
    std::uint64_t seed = required_seed(ctx, "billiards");

    const Domain* doms[2] = {&pair.omega1, &pair.omega2};
    const char* names[2] = {"omega1", "omega2"};
    for (int d = 0; d < 2; ++d) {
        const Boundary& bd = doms[d]->boundary();
        const EllipseSpec& ell = doms[d]->ellipse();
        for (int i = 0; i < n_traj; ++i) {
            auto rng = make_rng(seed, static_cast<std::uint64_t>(2 * i + d));
            std::uniform_real_distribution<double> ux(-ell.a, ell.a), uy(-ell.b, ell.b),
                uth(0, 2 * M_PI);
            Vec2 origin;
            do {
                origin = {ux(rng), uy(rng)};
            } while (!bd.inside(origin, 1e-6 * ell.a));
            double th = uth(rng);
            Trajectory traj = trace(bd, ell, {origin, {std::cos(th), std::sin(th)}},
                                    n_bounces);
            Table t({"bounce_index", "s", "x", "y", "dx", "dy", "mu", "zone"});
            for (std::size_t j = 0; j < traj.bounces.size(); ++j) {
                const Bounce& bb = traj.bounces[j];
                t.row({static_cast<int>(j), bb.s, bb.position.x(), bb.position.y(),
                       bb.outgoing.x(), bb.outgoing.y(), bb.mu, zone_name(bb.zone)});
            }
            t.write(ctx, std::string("traj_") + names[d] + "_" + std::to_string(i));
        }
    }
    ctx.report["billiard_trace"] = {{"n_traj", n_traj}, {"n_bounces", n_bounces},
                                    {"seed", seed}};
    return 0;
}

int run_billiard_lengths(Ctx& ctx) {
    MushroomPair pair = pair_from(ctx.cfg);
    SearchCaps caps = caps_from(ctx);
    LengthSpectrum l1 = length_spectrum(pair.omega1.boundary(), pair.omega1.ellipse(), caps);
    LengthSpectrum l2 = length_spectrum(pair.omega2.boundary(), pair.omega2.ellipse(), caps);
    double tol = ctx.cfg.value("perturbation", json::object()).value("match_tol", 1e-8);
    SpectrumMatch match = compare_spectra(l1, l2, tol);
    emit_spectrum(ctx, "spectrum_omega1", l1);
    emit_spectrum(ctx, "spectrum_omega2", l2);
    json doc = {{"pass", match.pass},
                {"max_gap", match.max_gap},
                {"unmatched_1", match.unmatched_1},
                {"unmatched_2", match.unmatched_2},
                {"match_tol", tol},
                {"entries_omega1", spectrum_json(l1)},
                {"entries_omega2", spectrum_json(l2)}};
    write_json_payload(ctx, "lengths", doc);
    ctx.report["billiard_lengths"] = doc;
    return match.pass ? 0 : 1;
}

int run_billiard_dichotomy(Ctx& ctx) {
    MushroomPair pair = pair_from(ctx.cfg);
    const json b = ctx.cfg.value("billiards", json::object());
    int n_traj = b.value("n_traj", 1000);
    int n_bounces = b.value("n_bounces", 500);
    DichotomyReport rep = dichotomy_check(pair, n_traj, n_bounces,
                                          required_seed(ctx, "billiards"));
    json doc = {{"pass", rep.pass()},        {"n_traj", rep.n_traj},
                {"n_bounces", rep.n_bounces}, {"seed", rep.seed},
                {"violations", rep.violations}, {"abandoned", rep.abandoned},
                {"visited_m_only", rep.visited_m_only},
                {"visited_b_only", rep.visited_b_only},
                {"visited_neither", rep.visited_neither}};
    write_json_payload(ctx, "dichotomy", doc);
    ctx.report["billiard_dichotomy"] = doc;
    return rep.pass() ? 0 : 1;
}

int run_spectrum_eigs(Ctx& ctx) {
    MushroomPair pair = pair_from(ctx.cfg);
    const json s = ctx.cfg.at("spectral");
    double k_min = s.at("k_min").get<double>();
    double k_max = s.at("k_max").get<double>();
    int n_scan = s.at("n_scan").get<int>();
    MfsOptions opt = mfs_from(ctx);

    const Domain* doms[2] = {&pair.omega1, &pair.omega2};
    const char* names[2] = {"omega1", "omega2"};
    json summary = json::object();
    for (int d = 0; d < 2; ++d) {
        auto shape = std::make_shared<MushroomShape>(*doms[d]);
        std::vector<double> ks(n_scan);
        for (int i = 0; i < n_scan; ++i)
            ks[i] = k_min + (k_max - k_min) * i / (n_scan - 1);
        std::vector<double> vals = indicator_sweep(*shape, ks, opt);
        Table sweep({"k", "indicator"});
        for (int i = 0; i < n_scan; ++i) sweep.row({ks[i], vals[i]});
        sweep.write(ctx, std::string("sweep_") + names[d]);

        FindEigsResult found = find_eigs(shape, k_min, k_max, n_scan, opt);
        Table eigs({"index", "lambda", "k", "error_bar", "method"});
        json lambdas = json::array();
        for (std::size_t i = 0; i < found.pairs.size(); ++i) {
            const EigenPair& p = found.pairs[i];
            eigs.row({static_cast<int>(i), p.lambda, p.k, p.error_bar, "mfs"});
            lambdas.push_back(p.lambda);
        }
        eigs.write(ctx, std::string("eigs_") + names[d]);
        summary[names[d]] = {{"lambdas", lambdas}, {"warnings", found.warnings}};
    }
    ctx.report["spectrum_eigs"] = summary;
    return 0;
}

int run_spectrum_trace(Ctx& ctx) {
    MushroomPair pair = pair_from(ctx.cfg);
    GroundStateOptions opt = gs_from(ctx);
    auto shape = std::make_shared<MushroomShape>(pair.omega1);
    auto gs = std::make_shared<EigenPair>(ground_state(shape, opt));
    BoundaryTrace tr = normal_trace(gs, opt.n_trace);
    Table t({"s", "x", "y", "dpsi_dnu", "weight"});
    for (const auto& nd : tr.nodes)
        t.row({nd.s, nd.pos.x(), nd.pos.y(), nd.dpsi_dnu, nd.weight});
    t.write(ctx, "trace_omega1");
    ctx.report["spectrum_trace"] = {{"lambda0", gs->lambda},
                                    {"error_bar", gs->error_bar},
                                    {"nodes", tr.nodes.size()}};
    return 0;
}

int run_perturb_rates(Ctx& ctx) {
    MushroomPair pair = pair_from(ctx.cfg);
    const json p = ctx.cfg.value("perturbation", json::object());
    double eps = p.value("epsilon", 1e-3 * pair.omega1.ellipse().b);
    auto [d1, d2] = pair_rates(base_spec(pair), focal_perturbation(ctx, eps), gs_from(ctx));
    json doc = {{"d1", d1},
                {"d2", d2},
                {"diff", std::abs(d1 - d2)},
                {"rel_diff", std::abs(d1 - d2) / std::max(std::abs(d1), 1e-300)}};
    write_json_payload(ctx, "rates", doc);
    ctx.report["perturb_rates"] = doc;
    return 0;
}

int run_perturb_check(Ctx& ctx) {
    MushroomPair pair = pair_from(ctx.cfg);
    FdRateReport rep = fd_rate_check(base_spec(pair), focal_perturbation(ctx, 0), {},
                                     gs_from(ctx));
    json doc = {{"hadamard", rep.hadamard},       {"lambda0", rep.lambda0},
                {"eps_list", rep.eps_list},       {"lambda", rep.lambda},
                {"slope", rep.slope},             {"richardson", rep.richardson},
                {"rel_deviation", rep.rel_deviation},
                {"observed_order", rep.observed_order},
                {"nonlinear", rep.nonlinear}};
    write_json_payload(ctx, "rate_check", doc);
    ctx.report["perturb_check"] = doc;
    return 0;
}

int run_certify(Ctx& ctx) {
    MushroomPair pair = pair_from(ctx.cfg);
    const json p = ctx.cfg.value("perturbation", json::object());
    double eps = p.value("epsilon", 1e-3 * pair.omega1.ellipse().b);
    CertifyThresholds th;
    th.match_tol = p.value("match_tol", 1e-8);
    th.safety_factor = p.value("safety_factor", 5.0);
    std::uint64_t seed = required_seed(ctx, "perturbation");
    SearchCaps caps = caps_from(ctx);
    Certificate cert = certify(pair, eps, caps, th, seed, gs_from(ctx));
    json doc = certificate_json(cert);
    write_json_payload(ctx, "certificate", doc);
    ctx.report["certificate"] = doc;
    bool expect_differ = p.value("expect_differ", true);
    if (cert.status == VerdictStatus::Inconclusive) return 2;
    if (expect_differ && !(cert.lengths_match && cert.spectra_differ)) return 1;
    if (!expect_differ && cert.spectra_differ) return 1;
    return 0;
}

int run_scan(Ctx& ctx) {
    MushroomPair pair = pair_from(ctx.cfg);
    const json p = ctx.cfg.value("perturbation", json::object());
    int n_samples = p.value("n_samples", 100);
    double threshold = p.value("rate_threshold", 1e-3);
    ScanReport rep = genericity_scan(base_spec(pair), n_samples,
                                     required_seed(ctx, "perturbation"), threshold,
                                     gs_from(ctx));
    Table t({"center", "half_width", "depth", "d1", "d2", "rel_diff"});
    for (const auto& s : rep.samples)
        t.row({s.bump.center, s.bump.half_width, s.bump.depth, s.d1, s.d2, s.rel_diff});
    t.write(ctx, "scan");
    json doc = {{"n_samples", n_samples},
                {"seed", rep.seed},
                {"threshold_rel", rep.threshold_rel},
                {"fraction", rep.fraction}};
    write_json_payload(ctx, "scan_summary", doc);
    ctx.report["scan"] = doc;
    return 0;
}

int run_verify_all(Ctx& ctx) {
    // Composed pipeline over the configured pair; exit 0 iff every step
    // passes and no verdict is inconclusive.
    struct Step {
        const char* name;
        int (*fn)(Ctx&);
    };
    const Step steps[] = {{"pair_make", run_pair_make},
                          {"billiard_dichotomy", run_billiard_dichotomy},
                          {"billiard_lengths", run_billiard_lengths},
                          {"perturb_rates", run_perturb_rates},
                          {"certify", run_certify},
                          {"scan", run_scan}};
    json results = json::object();
    int worst = 0;
    for (const auto& st : steps) {
        int code = st.fn(ctx);
        results[st.name] = code;
        if (code == 2 && worst == 0) worst = 2;
        if (code == 1) worst = 1;
    }
    json doc = {{"steps", results}, {"exit", worst}};
    write_json_payload(ctx, "verify_all", doc);
    ctx.report["verify_all"] = doc;
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_cap();
    CLI::App app{"mushroom-pair workbench: billiard length spectra vs Laplacian "
                 "spectra on Penrose-style domain pairs"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", format = "csv";
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "payload format")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "override all configured seeds");

    const std::vector<std::pair<std::string, int (*)(Ctx&)>> cmds = {
        {"pair-make", run_pair_make},         {"billiard-trace", run_billiard_trace},
        {"billiard-lengths", run_billiard_lengths},
        {"billiard-dichotomy", run_billiard_dichotomy},
        {"spectrum-eigs", run_spectrum_eigs}, {"spectrum-trace", run_spectrum_trace},
        {"perturb-rates", run_perturb_rates}, {"perturb-check", run_perturb_check},
        {"certify", run_certify},             {"scan", run_scan},
        {"verify-all", run_verify_all}};
    for (const auto& c : cmds) app.add_subcommand(c.first, "");

    CLI11_PARSE(app, argc, argv);

    try {
        Ctx ctx;
        ctx.out_dir = out_dir;
        ctx.format = format;
        ctx.seed_override = seed;
        {
            std::ifstream in(config_path);
            if (!in) throw IoError("cannot open config " + config_path);
            try {
                ctx.cfg = json::parse(in);
            } catch (const json::parse_error& e) {
                throw std::invalid_argument(std::string("config parse error: ") + e.what());
            }
        }
        pair_from(ctx.cfg); // eager geometry validation
        fs::create_directories(out_dir);

        auto t0 = std::chrono::steady_clock::now();
        int code = 1;
        std::string name;
        for (const auto& c : cmds)
            if (app.get_subcommand(c.first)->parsed()) {
                name = c.first;
                code = c.second(ctx);
            }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();

        json report = {{"version", kVersion},
                       {"subcommand", name},
                       {"config", ctx.cfg},
                       {"seed_override", seed ? json(*seed) : json(nullptr)},
                       {"results", ctx.report},
                       {"timing_ms", ms},
                       {"exit", code}};
        std::ofstream rep(fs::path(out_dir) / "report.json");
        rep << report.dump(2) << '\n';
        std::printf("%s: exit %d (%lld ms)\n", name.c_str(), code,
                    static_cast<long long>(ms));
        return code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

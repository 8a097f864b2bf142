#include "turbulent/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "turbulent/common.hpp"
#include "turbulent/divisor_forms.hpp"
#include "turbulent/elliptic.hpp"
#include "turbulent/foliation.hpp"
#include "turbulent/io.hpp"
#include "turbulent/moduli.hpp"
#include "turbulent/projective.hpp"

namespace turbulent::cli {
namespace {

/// Thrown by handlers when input data fails a mathematical verification.
/// The driver prints the prepared JSON report to stdout and exits 2.
struct VerificationFailure {
    std::string report;
    std::string message;
};

TorusPoint reduced(const TorusPoint& p, const Lattice& L) { return reduce_point(lift(p, L), L); }

std::vector<TorusPoint> reduced(const std::vector<TorusPoint>& pts, const Lattice& L) {
    std::vector<TorusPoint> out;
    out.reserve(pts.size());
    for (const TorusPoint& p : pts) out.push_back(reduced(p, L));
    return out;
}

void check_abel_or_fail(const std::vector<TorusPoint>& x, const std::vector<TorusPoint>& y,
                        const Lattice& L, double tol) {
    const AbelResult abel = abel_check(x, y, L, tol);
    if (abel.verdict) return;
    io::JsonWriter w;
    w.begin_object();
    w.field("valid", false);
    w.field("abel_defect", abel.defect);
    w.field("abel_defect_abs", std::abs(abel.defect));
    w.end_object();
    throw VerificationFailure{
        w.str(), "abel condition violated: |defect| = " + io::format_double(std::abs(abel.defect))};
}

/// Scenario flags shared by every subcommand that needs a divisor pair:
/// exactly one of an explicit --pair document or a seeded (--d, --seed)
/// sample.
struct ScenarioFlags {
    std::string pair_file;
    int d = 0;
    std::uint64_t seed = 1;
    std::string tau = "0,1";
    std::string scale;  ///< empty: document value, or 1 for sampled pairs
};

void add_scenario_flags(CLI::App* sub, ScenarioFlags& f) {
    sub->add_option("--pair", f.pair_file, "Divisor-pair JSON document");
    sub->add_option("--d", f.d, "Degree for the seeded pair sampler");
    sub->add_option("--seed", f.seed, "Sampler seed (default 1)");
    sub->add_option("--tau", f.tau, "Curve modulus re,im for the sampler (default 0,1)");
    sub->add_option("--scale", f.scale, "Form scale re,im (default: document value, or 1,0)");
}

struct Scenario {
    DivisorPair pair;
    cplx scale;
};

Scenario resolve_scenario(const ScenarioFlags& f, double tol) {
    const bool has_file = !f.pair_file.empty();
    const bool has_d = f.d != 0;
    if (has_file == has_d)
        throw std::invalid_argument("scenario requires exactly one of --pair or --d");
    if (has_file) {
        const io::RawPairDocument doc = io::read_pair_document(io::read_file(f.pair_file));
        const Lattice L(doc.tau);
        const std::vector<TorusPoint> x = reduced(doc.x, L);
        const std::vector<TorusPoint> y = reduced(doc.y, L);
        check_abel_or_fail(x, y, L, tol);
        Scenario sc{make_divisor_pair(x, y, L, tol),
                    f.scale.empty() ? doc.scale : io::parse_complex(f.scale)};
        return sc;
    }
    if (f.d < 2) throw std::invalid_argument("--d must be at least 2");
    Scenario sc{sample_divisor_pair(f.d, Lattice(io::parse_complex(f.tau)), f.seed),
                f.scale.empty() ? cplx(1.0, 0.0) : io::parse_complex(f.scale)};
    return sc;
}

// ---------------------------------------------------------------- elliptic

struct EllipticFlags {
    std::string tau = "0,1";
    int n = 100;
    std::uint64_t seed = 1;
    double tol = 0.0;
    bool tol_set = false;
};

int do_elliptic_check(const EllipticFlags& f, std::ostream& out, std::ostream& err) {
    if (f.n < 1) throw std::invalid_argument("--n must be positive");
    const Lattice L(io::parse_complex(f.tau));
    const cplx tau = L.tau();
    const WeierstrassCache& C = L.cache();
    const double legendre = std::abs(C.eta1 * tau - C.eta2 - cplx(0.0, 2.0 * kPi));

    std::mt19937_64 rng(f.seed);
    double ode_max = 0.0;
    double sigma_max = 0.0;
    int produced = 0;
    for (int attempts = 0; produced < f.n && attempts < 100 * f.n + 1000; ++attempts) {
        const TorusPoint p{detail::uniform01(rng), detail::uniform01(rng)};
        const cplx z = lift(p, L);
        if (lattice_distance(z, L) < 0.05) continue;
        ++produced;

        const cplx P = wp(z, L);
        const cplx Pp = wp_prime(z, L);
        const cplx lhs = Pp * Pp;
        const cplx rhs = 4.0 * P * P * P - C.g2 * P - C.g3;
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        ode_max = std::max(ode_max, std::abs(lhs - rhs) / scale);

        const cplx s0 = sigma_w(z, L);
        const cplx s1 = sigma_w(z + 1.0, L);
        const cplx e1 = -s0 * std::exp(C.eta1 * (z + 0.5));
        sigma_max = std::max(sigma_max, std::abs(s1 - e1) / std::max(1.0, std::abs(e1)));
        const cplx st = sigma_w(z + tau, L);
        const cplx e2 = -s0 * std::exp(C.eta2 * (z + 0.5 * tau));
        sigma_max = std::max(sigma_max, std::abs(st - e2) / std::max(1.0, std::abs(e2)));
    }
    if (produced < f.n) throw std::runtime_error("point sampling failed to clear lattice points");

    const double ode_tol = f.tol_set ? f.tol : 1e-9;
    const double leg_tol = f.tol_set ? f.tol : 1e-12;
    const double sig_tol = f.tol_set ? f.tol : 1e-9;
    const bool pass = ode_max < ode_tol && legendre < leg_tol && sigma_max < sig_tol;

    io::JsonWriter w;
    w.begin_object();
    w.field("tau", tau);
    w.field("points", f.n);
    w.field("wp_ode_max", ode_max);
    w.field("legendre_residual", legendre);
    w.field("sigma_quasi_max", sigma_max);
    w.field("pass", pass);
    w.end_object();
    out << w.str() << "\n";
    if (!pass) {
        err << "verification failure: elliptic identity residual above tolerance\n";
        return 2;
    }
    return 0;
}

// -------------------------------------------------------------------- form

struct FormFlags {
    ScenarioFlags scenario;
    std::string out_file;
    std::string verify_file;
    double radius = 0.0;
    int grid = 8;
    double tol = default_tol();
};

int do_form_build(const FormFlags& f, std::ostream& out) {
    const Scenario sc = resolve_scenario(f.scenario, f.tol);
    const MeromorphicOneForm form = build_one_form(sc.pair, sc.scale, f.tol);
    const std::string doc = io::write_pair_document(sc.pair, sc.scale, form.abel_defect());
    if (!f.out_file.empty()) io::write_file(f.out_file, doc + "\n");
    out << doc << "\n";
    return 0;
}

int do_form_verify(const FormFlags& f, std::ostream& out, std::ostream& err) {
    const io::RawPairDocument doc = io::read_pair_document(io::read_file(f.verify_file));
    const Lattice L(doc.tau);
    const std::vector<TorusPoint> x = reduced(doc.x, L);
    const std::vector<TorusPoint> y = reduced(doc.y, L);
    check_abel_or_fail(x, y, L, f.tol);
    const DivisorPair pair = make_divisor_pair(x, y, L, f.tol);
    const MeromorphicOneForm form = build_one_form(pair, doc.scale, f.tol);

    // Double-periodicity residual at deterministic probes clear of the
    // divisor; the threshold scales with the Abel tolerance.
    const cplx tau = L.tau();
    double residual = 0.0;
    int used = 0;
    for (int k = 0; k < 24 && used < 12; ++k) {
        const double a = std::fmod(0.17 + 0.37 * k, 1.0);
        const double b = std::fmod(0.29 + 0.31 * k, 1.0);
        const TorusPoint p{a, b};
        bool clear = true;
        for (const TorusPoint& s : pair.x)
            if (torus_distance(p, s, L) < 1e-3) clear = false;
        for (const TorusPoint& s : pair.y)
            if (torus_distance(p, s, L) < 1e-3) clear = false;
        if (!clear) continue;
        ++used;
        const cplx z = lift(p, L);
        const cplx f0 = form.eval(z);
        const double scale = std::max(1.0, std::abs(f0));
        residual = std::max(residual, std::abs(form.eval(z + 1.0) - f0) / scale);
        residual = std::max(residual, std::abs(form.eval(z + tau) - f0) / scale);
    }
    if (used == 0) throw std::runtime_error("no probe point cleared the divisor support");

    const double threshold = 1e3 * f.tol;
    const bool valid = residual < threshold;
    io::JsonWriter w;
    w.begin_object();
    w.field("valid", valid);
    w.field("abel_defect", form.abel_defect());
    w.field("abel_defect_abs", std::abs(form.abel_defect()));
    w.field("periodicity_residual", residual);
    w.end_object();
    out << w.str() << "\n";
    if (!valid) {
        err << "verification failure: periodicity residual above threshold\n";
        return 2;
    }
    return 0;
}

int do_form_residues(const FormFlags& f, std::ostream& out) {
    const Scenario sc = resolve_scenario(f.scenario, f.tol);
    const MeromorphicOneForm form = build_one_form(sc.pair, sc.scale, f.tol);
    const double radius =
        f.radius > 0.0 ? f.radius : std::min(0.08, 0.3 * min_support_distance(sc.pair));
    const std::vector<std::pair<TorusPoint, cplx>> rs = residues(form, radius);
    cplx sum(0.0, 0.0);
    io::JsonWriter w;
    w.begin_object();
    w.field("radius", radius);
    w.begin_array("residues");
    for (const auto& [point, value] : rs) {
        w.begin_object();
        w.begin_array("point").element(point.a).element(point.b).end_array();
        w.field("value", value);
        w.end_object();
        sum += value;
    }
    w.end_array();
    w.field("sum", sum);
    w.field("sum_abs", std::abs(sum));
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

int do_form_count(const FormFlags& f, std::ostream& out) {
    const Scenario sc = resolve_scenario(f.scenario, f.tol);
    const MeromorphicOneForm form = build_one_form(sc.pair, sc.scale, f.tol);
    const DivisorCount count = count_divisor(form, f.grid);
    io::JsonWriter w;
    w.begin_object();
    w.field("grid", f.grid);
    w.field("zeros", count.zeros);
    w.field("poles", count.poles);
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

// --------------------------------------------------------------- foliation

struct FoliationFlags {
    ScenarioFlags scenario;
    std::string beta = "1,0";
    std::string tau_x = "0,1";
    std::string c;
    std::string x = "0,0";
    std::string z = "0,0";
    std::string out_file;
    double horizon = 10.0;
    int grid = 8;
    double tol = default_tol();
};

TurbulentFoliation make_foliation(const FoliationFlags& f) {
    const Scenario sc = resolve_scenario(f.scenario, f.tol);
    MeromorphicOneForm form = build_one_form(sc.pair, sc.scale, f.tol);
    return build_turbulent(std::move(form), io::parse_complex(f.beta),
                           Lattice(io::parse_complex(f.tau_x)));
}

int do_foliation_field(const FoliationFlags& f, std::ostream& out) {
    const TurbulentFoliation F = make_foliation(f);
    const TorusPoint c = reduced(io::parse_coords(f.c), F.lattice_c());
    const TorusPoint x = reduced(io::parse_coords(f.x), F.lattice_x);
    const LineDirection ld = line_field(F, c, x);
    io::JsonWriter w;
    w.begin_object();
    w.field("chart", std::string(1, ld.chart));
    w.field("v_c", ld.v_c);
    w.field("v_x", ld.v_x);
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

int do_foliation_trace(const FoliationFlags& f, std::ostream& out) {
    const TurbulentFoliation F = make_foliation(f);
    const TorusPoint c0 = reduced(io::parse_coords(f.c), F.lattice_c());
    const TorusPoint x0 = reduced(io::parse_coords(f.x), F.lattice_x);
    const LeafTrace trace = trace_leaf(F, c0, x0, f.horizon, f.tol);
    const std::string csv = io::write_trace_csv(trace);
    if (f.out_file.empty()) {
        out << csv;
        return 0;
    }
    io::write_file(f.out_file, csv);
    io::JsonWriter w;
    w.begin_object();
    w.field("completed", trace.completed);
    w.field("t_reached", trace.t_reached);
    w.field("samples", static_cast<long long>(trace.samples.size()));
    w.field("chart_switches", trace.chart_switches);
    w.field("drift", trace.drift);
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

int do_foliation_leaves(const FoliationFlags& f, std::ostream& out) {
    const TurbulentFoliation F = make_foliation(f);
    const std::vector<TorusPoint> leaves = compact_leaves(F);
    io::JsonWriter w;
    w.begin_object();
    w.field("count", static_cast<long long>(leaves.size()));
    w.begin_array("leaves");
    for (const TorusPoint& p : leaves) w.begin_array().element(p.a).element(p.b).end_array();
    w.end_array();
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

int do_foliation_degree(const FoliationFlags& f, std::ostream& out) {
    const TurbulentFoliation F = make_foliation(f);
    const TorusPoint z = reduced(io::parse_coords(f.z), F.lattice_x);
    const int degree = normal_bundle_degree(F, z, f.grid);
    io::JsonWriter w;
    w.begin_object();
    w.field("degree", degree);
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

// ------------------------------------------------------------------ moduli

struct ModuliFlags {
    ScenarioFlags scenario;
    int d = 0;
    double h = 1e-5;
    double tol = default_tol();
};

int do_moduli_report(const ModuliFlags& f, std::ostream& out) {
    const DimensionReport r = obstruction_report(f.d);
    io::JsonWriter w;
    w.begin_object();
    w.field("d", r.d);
    w.field("dim_moduli", r.dim_moduli);
    w.field("dim_quadruples_bound", r.dim_quadruples_bound);
    w.field("obstructed", r.obstructed);
    w.field("margin", r.margin);
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

int do_moduli_rank(const ModuliFlags& f, std::ostream& out) {
    const Scenario sc = resolve_scenario(f.scenario, f.tol);
    const int rank = abel_constraint_rank(sc.pair, f.h);
    io::JsonWriter w;
    w.begin_object();
    w.field("d", sc.pair.d);
    w.field("h", f.h);
    w.field("rank", rank);
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

// ------------------------------------------------------------------ bundle

struct BundleFlags {
    std::string file;
    std::string path;
    std::string w0 = "0,0";
    std::string z;
    int grid = 0;
    double tol = default_tol();
};

P1Point parse_p1(const std::string& s) {
    if (s == "inf" || s == "infinity") return P1Point::infinity();
    return P1Point::finite(io::parse_complex(s));
}

FlatP1Bundle load_bundle(const io::RawBundleDocument& doc) {
    const Lattice L(doc.tau);
    if (doc.connection) {
        const SL2Element m = *doc.connection;
        return FlatP1Bundle(L, doc.monodromy_a, doc.monodromy_b, [m](cplx) { return m; });
    }
    return FlatP1Bundle(L, doc.monodromy_a, doc.monodromy_b);
}

ProjectiveTriple load_triple(const io::RawBundleDocument& doc) {
    if (doc.section_name.empty())
        throw std::invalid_argument("bundle document names no section (\"section\" field)");
    FlatP1Bundle bundle = load_bundle(doc);
    EquivariantSection section = make_builtin_section(bundle, doc.section_name, doc.section_param);
    const SL2Element theta = doc.theta ? *doc.theta
                                       : SL2Element{cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0),
                                                    cplx(0.0, 0.0)};
    return ProjectiveTriple{std::move(bundle), std::move(section), theta};
}

void write_p1_field(io::JsonWriter& w, const std::string& key, const P1Point& p) {
    if (p.infinite)
        w.field(key, "inf");
    else
        w.field(key, p.w);
}

int do_bundle_transport(const BundleFlags& f, std::ostream& out) {
    const io::RawBundleDocument doc = io::read_bundle_document(io::read_file(f.file));
    const FlatP1Bundle bundle = load_bundle(doc);
    const P1Point w0 = parse_p1(f.w0);
    const P1Point w1 = riccati_transport(bundle, io::parse_path(f.path), w0, f.tol);
    io::JsonWriter w;
    w.begin_object();
    write_p1_field(w, "w", w1);
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

int do_bundle_sff(const BundleFlags& f, std::ostream& out) {
    const io::RawBundleDocument doc = io::read_bundle_document(io::read_file(f.file));
    const ProjectiveTriple t = load_triple(doc);
    const bool has_z = !f.z.empty();
    const bool has_grid = f.grid != 0;
    if (has_z == has_grid)
        throw std::invalid_argument("sff requires exactly one of --z or --grid");
    io::JsonWriter w;
    w.begin_object();
    if (has_z) {
        const cplx z = io::parse_complex(f.z);
        w.field("z", z);
        w.field("sff", second_fundamental_form(t, z));
    } else {
        w.field("grid", f.grid);
        w.field("count", sff_vanishing_count(t, f.grid));
    }
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

int do_bundle_develop(const BundleFlags& f, std::ostream& out) {
    const io::RawBundleDocument doc = io::read_bundle_document(io::read_file(f.file));
    const ProjectiveTriple t = load_triple(doc);
    const P1Point gamma = develop(t, io::parse_path(f.path), f.tol);
    io::JsonWriter w;
    w.begin_object();
    write_p1_field(w, "gamma", gamma);
    w.end_object();
    out << w.str() << "\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Turbulent foliations on products of elliptic curves"};
    app.require_subcommand(1);

    // elliptic check
    EllipticFlags ef;
    CLI::App* elliptic = app.add_subcommand("elliptic", "Elliptic function layer");
    elliptic->require_subcommand(1);
    CLI::App* elliptic_check =
        elliptic->add_subcommand("check", "Verify the Weierstrass identities at random points");
    elliptic_check->add_option("--tau", ef.tau, "Lattice modulus re,im (default 0,1)");
    elliptic_check->add_option("--n", ef.n, "Number of sample points (default 100)");
    elliptic_check->add_option("--seed", ef.seed, "Sampling seed (default 1)");
    CLI::Option* ef_tol =
        elliptic_check->add_option("--tol", ef.tol, "Override the per-identity tolerances");

    // form build | verify | residues | count
    FormFlags ff;
    CLI::App* form = app.add_subcommand("form", "Meromorphic one-forms from divisor pairs");
    form->require_subcommand(1);
    CLI::App* form_build = form->add_subcommand("build", "Build a form and emit its document");
    add_scenario_flags(form_build, ff.scenario);
    form_build->add_option("--out", ff.out_file, "Also write the document to this file");
    form_build->add_option("--tol", ff.tol, "Abel tolerance (default 1e-9)");
    CLI::App* form_verify = form->add_subcommand("verify", "Verify a pair document");
    form_verify->add_option("file", ff.verify_file, "Pair document to verify")->required();
    form_verify->add_option("--tol", ff.tol, "Abel tolerance (default 1e-9)");
    CLI::App* form_residues = form->add_subcommand("residues", "Contour residues at every pole");
    add_scenario_flags(form_residues, ff.scenario);
    form_residues->add_option("--radius", ff.radius, "Contour radius (default: auto)");
    form_residues->add_option("--tol", ff.tol, "Abel tolerance (default 1e-9)");
    CLI::App* form_count = form->add_subcommand("count", "Argument-principle divisor count");
    add_scenario_flags(form_count, ff.scenario);
    form_count->add_option("--grid", ff.grid, "Counting grid subdivision (default 8)");
    form_count->add_option("--tol", ff.tol, "Abel tolerance (default 1e-9)");

    // foliation field | trace | leaves | degree
    FoliationFlags lf;
    CLI::App* foliation = app.add_subcommand("foliation", "The kernel foliation of omega + beta dx");
    foliation->require_subcommand(1);
    CLI::App* fol_field = foliation->add_subcommand("field", "Leaf direction at a point");
    add_scenario_flags(fol_field, lf.scenario);
    fol_field->add_option("--beta", lf.beta, "Fiber form coefficient re,im (default 1,0)");
    fol_field->add_option("--tau-x", lf.tau_x, "Fiber-curve modulus re,im (default 0,1)");
    fol_field->add_option("--c", lf.c, "Base coordinates a,b")->required();
    fol_field->add_option("--x", lf.x, "Fiber coordinates a,b (default 0,0)");
    fol_field->add_option("--tol", lf.tol, "Abel tolerance (default 1e-9)");
    CLI::App* fol_trace = foliation->add_subcommand("trace", "Integrate a leaf");
    add_scenario_flags(fol_trace, lf.scenario);
    fol_trace->add_option("--beta", lf.beta, "Fiber form coefficient re,im (default 1,0)");
    fol_trace->add_option("--tau-x", lf.tau_x, "Fiber-curve modulus re,im (default 0,1)");
    fol_trace->add_option("--c0", lf.c, "Initial base coordinates a,b")->required();
    fol_trace->add_option("--x0", lf.x, "Initial fiber coordinates a,b (default 0,0)");
    fol_trace->add_option("--horizon", lf.horizon, "Parameter horizon (default 10)");
    fol_trace->add_option("--out", lf.out_file, "Write the CSV trace here; stdout gets a summary");
    fol_trace->add_option("--tol", lf.tol, "Integrator step tolerance (default 1e-9)");
    CLI::App* fol_leaves = foliation->add_subcommand("leaves", "Compact leaves (pole fibers)");
    add_scenario_flags(fol_leaves, lf.scenario);
    fol_leaves->add_option("--beta", lf.beta, "Fiber form coefficient re,im (default 1,0)");
    fol_leaves->add_option("--tau-x", lf.tau_x, "Fiber-curve modulus re,im (default 0,1)");
    fol_leaves->add_option("--tol", lf.tol, "Abel tolerance (default 1e-9)");
    CLI::App* fol_degree = foliation->add_subcommand("degree", "Normal-bundle degree over a slice");
    add_scenario_flags(fol_degree, lf.scenario);
    fol_degree->add_option("--beta", lf.beta, "Fiber form coefficient re,im (default 1,0)");
    fol_degree->add_option("--tau-x", lf.tau_x, "Fiber-curve modulus re,im (default 0,1)");
    fol_degree->add_option("--z", lf.z, "Slice coordinates a,b (default 0,0)");
    fol_degree->add_option("--grid", lf.grid, "Counting grid subdivision (default 8)");
    fol_degree->add_option("--tol", lf.tol, "Abel tolerance (default 1e-9)");

    // moduli report | rank
    ModuliFlags mf;
    CLI::App* moduli = app.add_subcommand("moduli", "Dimension counts and constraint ranks");
    moduli->require_subcommand(1);
    CLI::App* moduli_report = moduli->add_subcommand("report", "Moduli dimension versus bound");
    moduli_report->add_option("--d", mf.d, "Divisor degree")->required();
    CLI::App* moduli_rank = moduli->add_subcommand("rank", "Rank of the Abel constraint");
    add_scenario_flags(moduli_rank, mf.scenario);
    // The step option is spelled --h, so this subcommand keeps only the long
    // help flag.
    moduli_rank->set_help_flag("--help", "Print this help message and exit");
    moduli_rank->add_option("--h", mf.h, "Finite-difference step (default 1e-5)");
    moduli_rank->add_option("--tol", mf.tol, "Abel tolerance (default 1e-9)");

    // bundle transport | sff | develop
    BundleFlags bf;
    CLI::App* bundle = app.add_subcommand("bundle", "Flat P1-bundles over the curve");
    bundle->require_subcommand(1);
    CLI::App* bundle_transport = bundle->add_subcommand("transport", "Riccati parallel transport");
    bundle_transport->add_option("file", bf.file, "Bundle document")->required();
    bundle_transport->add_option("--path", bf.path, "Polyline re,im;re,im;...")->required();
    bundle_transport->add_option("--w0", bf.w0, "Initial value re,im or inf (default 0,0)");
    bundle_transport->add_option("--tol", bf.tol, "Transport tolerance (default 1e-9)");
    CLI::App* bundle_sff = bundle->add_subcommand("sff", "Second fundamental form of the section");
    bundle_sff->add_option("file", bf.file, "Bundle document")->required();
    bundle_sff->add_option("--z", bf.z, "Evaluate at this cover point re,im");
    bundle_sff->add_option("--grid", bf.grid, "Count vanishing points on this grid instead");
    CLI::App* bundle_develop = bundle->add_subcommand("develop", "Developing map along a path");
    bundle_develop->add_option("file", bf.file, "Bundle document")->required();
    bundle_develop->add_option("--path", bf.path, "Polyline re,im;re,im;...")->required();
    bundle_develop->add_option("--tol", bf.tol, "Transport tolerance (default 1e-9)");

    std::vector<const char*> argv;
    const std::string prog = "turbulent";
    argv.push_back(prog.c_str());
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    ef.tol_set = ef_tol->count() > 0;

    try {
        if (elliptic_check->parsed()) return do_elliptic_check(ef, out, err);
        if (form_build->parsed()) return do_form_build(ff, out);
        if (form_verify->parsed()) return do_form_verify(ff, out, err);
        if (form_residues->parsed()) return do_form_residues(ff, out);
        if (form_count->parsed()) return do_form_count(ff, out);
        if (fol_field->parsed()) return do_foliation_field(lf, out);
        if (fol_trace->parsed()) return do_foliation_trace(lf, out);
        if (fol_leaves->parsed()) return do_foliation_leaves(lf, out);
        if (fol_degree->parsed()) return do_foliation_degree(lf, out);
        if (moduli_report->parsed()) return do_moduli_report(mf, out);
        if (moduli_rank->parsed()) return do_moduli_rank(mf, out);
        if (bundle_transport->parsed()) return do_bundle_transport(bf, out);
        if (bundle_sff->parsed()) return do_bundle_sff(bf, out);
        if (bundle_develop->parsed()) return do_bundle_develop(bf, out);
    } catch (const VerificationFailure& v) {
        out << v.report << "\n";
        err << "verification failure: " << v.message << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        err << "verification failure: " << e.what() << "\n";
        return 2;
    }
    err << "error: no subcommand selected\n";
    return 1;
}

}  // namespace turbulent::cli

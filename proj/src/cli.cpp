#include "mixnl/cli.hpp"

#include "mixnl/analysis_checks.hpp"
#include "mixnl/bifurcation.hpp"
#include "mixnl/config.hpp"
#include "mixnl/dissipation.hpp"
#include "mixnl/errors.hpp"
#include "mixnl/frackernel.hpp"
#include "mixnl/io.hpp"
#include "mixnl/spectral.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>

namespace mixnl {

namespace {

struct Options {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<double> h;
    std::optional<std::uint64_t> seed;
    std::optional<double> s;
};

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double dt = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return dt;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct Context {
    std::string subcommand;
    Options opts;
    RunConfig cfg;
    std::string out_dir;
    RunManifest manifest;
    std::ostream& out;

    std::string path(const std::string& name) const { return (std::filesystem::path(out_dir) / name).string(); }

    void finish() {
        manifest.subcommand = subcommand;
        manifest.config_path = opts.config_path;
        manifest.output_dir = out_dir;
        manifest.seed = cfg.seed;
        manifest.resolved_config = serialize_config(cfg);
        write_text(manifest.render(), path("manifest.txt"));
    }
};

RunConfig resolve_config(const Options& opts) {
    if (opts.config_path.empty()) {
        throw ConfigError("--config is required for this subcommand");
    }
    RunConfig cfg = load_config(opts.config_path);
    if (opts.h) {
        if (!(*opts.h > 0.0)) {
            throw ConfigError("--h must be positive");
        }
        cfg.mesh_h = *opts.h;
    }
    if (opts.s) {
        cfg.domain.fractional_order = *opts.s;
        if (cfg.schedule) {
            cfg.schedule->s = *opts.s;
        }
    }
    if (opts.seed) {
        cfg.seed = *opts.seed;
        cfg.picone_seed = *opts.seed;
        cfg.wmp_seed = *opts.seed;
    }
    validate_config(cfg.domain);
    return cfg;
}

AssembledSystem build_system(const RunConfig& cfg) {
    auto mesh = std::make_shared<const Mesh1D>(build_mesh(cfg.domain, cfg.mesh_h));
    return assemble(mesh, FracKernel::make(cfg.domain.fractional_order, cfg.nonlocal_weight));
}

double gamma_form_constant(double s) {
    return s * std::pow(4.0, s) * std::tgamma(0.5 + s) / (std::sqrt(M_PI) * std::tgamma(1.0 - s));
}

int cmd_constants(const Options& opts, std::ostream& out) {
    double s = 0.5;
    if (!opts.config_path.empty()) {
        s = load_config(opts.config_path).domain.fractional_order;
    }
    if (opts.s) {
        s = *opts.s;
    }
    if (!(s > 0.0 && s < 1.0)) {
        throw OrderError("s must lie in (0, 1)");
    }
    const double c_int = compute_normalization_constant(s);
    const double c_gamma = gamma_form_constant(s);
    out << std::setprecision(12) << "s = " << s << "\nC_1,s = " << c_int << "\nC_1,s (gamma form) = " << c_gamma
        << "\nrelative difference = " << std::abs(c_int - c_gamma) / c_gamma << '\n';
    if (opts.out_dir) {
        std::filesystem::create_directories(*opts.out_dir);
        CsvTable t;
        t.header = {"s", "c_integral", "c_gamma"};
        t.rows.push_back({format_double(s), format_double(c_int), format_double(c_gamma)});
        write_csv(t, (std::filesystem::path(*opts.out_dir) / "constants.csv").string());
    }
    return kExitOk;
}

int cmd_eig(Context& ctx) {
    Stopwatch sw;
    const AssembledSystem sys = build_system(ctx.cfg);
    ctx.manifest.timings.emplace_back("assemble", sw.lap());
    SolveOptions so;
    so.tol = ctx.cfg.eig_tol;
    const Spectrum sp = solve_smallest(sys, ctx.cfg.eig_count, so);
    ctx.manifest.timings.emplace_back("solve", sw.lap());
    ctx.out << "dofs = " << sys.size() << ", method = " << sp.diagnostics.method << '\n';
    for (std::size_t i = 0; i < sp.pairs.size(); ++i) {
        ctx.out << "lambda[" << i + 1 << "] = " << std::setprecision(12) << sp.pairs[i].lambda
                << "  (residual " << std::setprecision(3) << sp.pairs[i].residual << ")\n";
    }
    write_csv(to_csv(sp), ctx.path("eigenvalues.csv"));
    write_csv(to_csv(sp, *sys.mesh), ctx.path("eigenvectors.csv"));
    return kExitOk;
}

int cmd_sweep(Context& ctx, bool neumann) {
    if (!ctx.cfg.schedule) {
        throw ConfigError("config has no schedule.mode");
    }
    const bool is_neumann = ctx.cfg.schedule->mode == ScheduleMode::NeumannShrink;
    if (is_neumann != neumann) {
        throw ConfigError(std::string("schedule mode ") + std::string(to_string(ctx.cfg.schedule->mode)) +
                          " does not match " + ctx.subcommand);
    }
    Stopwatch sw;
    const ConvergenceTable table = run_schedule(*ctx.cfg.schedule, ctx.cfg.mesh_h, ctx.cfg.eig_tol);
    ctx.manifest.timings.emplace_back("schedule", sw.lap());
    ctx.out << to_string(table.mode) << ", target = " << std::setprecision(10) << table.target << '\n';
    for (const auto& r : table.rows) {
        ctx.out << "k = " << r.k << "  |set| = " << std::setprecision(6) << r.set_measure
                << "  lambda1 = " << std::setprecision(10) << r.lambda1 << "  rel_gap = " << std::setprecision(4)
                << r.rel_gap << "  integral = " << r.integral_condition << '\n';
    }
    write_csv(to_csv(table), ctx.path("convergence.csv"));
    return kExitOk;
}

int cmd_bifurcate(Context& ctx) {
    if (!ctx.cfg.nonlinearity) {
        throw ConfigError("config has no bifurcation.nonlinearity");
    }
    Stopwatch sw;
    const AssembledSystem sys = build_system(ctx.cfg);
    ctx.manifest.timings.emplace_back("assemble", sw.lap());
    const Branch b = continue_branch(sys, *ctx.cfg.nonlinearity, FromZero{}, ctx.cfg.continuation);
    ctx.manifest.timings.emplace_back("continuation", sw.lap());
    ctx.out << std::setprecision(12) << "lambda0 = " << b.lambda0 << "\nlambda_inf = " << b.lambda_inf
            << "\npoints = " << b.points.size() << "\ntermination = " << b.termination << '\n';
    const auto& last = b.points.back();
    ctx.out << "last point: lambda = " << last.lambda << ", |u|_inf = " << last.linf_norm << '\n';
    write_csv(to_csv(b), ctx.path("branch.csv"));
    if (ctx.cfg.write_inverted) {
        write_csv(to_csv(invert_branch(b)), ctx.path("branch_inverted.csv"));
    }
    return kExitOk;
}

CheckReport from_principal(const PrincipalReport& p, const char* name) {
    CheckReport r;
    r.name = name;
    r.pass = p.pass;
    r.margin = p.min_value;
    r.witness = "dof " + std::to_string(p.min_dof) + " x=" + format_double(p.min_x);
    return r;
}

int cmd_verify(Context& ctx) {
    Stopwatch sw;
    const RunConfig& cfg = ctx.cfg;
    const AssembledSystem sys = build_system(cfg);
    SolveOptions so;
    so.tol = cfg.eig_tol;
    const Spectrum sp = solve_smallest(sys, std::max(2, cfg.eig_count), so);
    ctx.manifest.timings.emplace_back("solve", sw.lap());
    const bool has_dirichlet = !cfg.domain.pure_neumann;

    std::vector<CheckReport> reports;
    if (has_dirichlet) {
        reports.push_back(from_principal(check_principal(sp, *sys.mesh), "principal_positive"));
    }
    {
        const PrincipalReport second = check_principal(sp, *sys.mesh, 1);
        CheckReport r;
        r.name = "second_sign_change";
        r.pass = second.sign_changes > 0;
        r.margin = static_cast<double>(second.sign_changes);
        reports.push_back(r);
    }
    {
        const SimplicityReport simple = check_simplicity(sp);
        CheckReport r;
        r.name = "simplicity";
        r.pass = simple.pass;
        r.margin = simple.relative_gap;
        reports.push_back(r);
    }
    {
        const OrthogonalityReport orth = check_orthogonality(sp, sys);
        CheckReport r;
        r.name = "orthogonality";
        r.pass = orth.pass;
        r.margin = 1e-8 - std::max(std::abs(orth.energy_product), std::abs(orth.mass_product));
        reports.push_back(r);
    }
    reports.push_back(picone_check(sys, sp, cfg.picone_trials, cfg.picone_seed));
    if (has_dirichlet) {
        reports.push_back(weak_max_principle_check(sys, cfg.wmp_trials, cfg.wmp_seed));
        reports.push_back(single_node_load_check(sys));
        CheckReport r;
        r.name = "poincare_constant";
        r.margin = poincare_constant(sys);
        r.pass = std::isfinite(r.margin) && r.margin > 0.0;
        reports.push_back(r);
    }
    if (!cfg.domain.neumann_set.empty()) {
        reports.push_back(neumann_reconstruction_check(sys, sp));
        reports.push_back(reconstruction_refinement_check(cfg.domain, cfg.mesh_h, cfg.nonlocal_weight));
    }
    ctx.manifest.timings.emplace_back("checks", sw.lap());

    bool all = true;
    for (const auto& r : reports) {
        all = all && r.pass;
        ctx.out << (r.pass ? "PASS " : "FAIL ") << r.name << "  margin = " << std::setprecision(6) << r.margin;
        if (!r.witness.empty()) {
            ctx.out << "  (" << r.witness << ")";
        }
        ctx.out << '\n';
    }
    write_csv(to_csv(reports), ctx.path("verify.csv"));
    return all ? kExitOk : kExitVerificationFailed;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mixed local-nonlocal eigenvalue laboratory", "mixnl"};
    app.require_subcommand(1, 1);
    // --h is the mesh size, so help is long-form only
    app.set_help_flag("--help", "print this help and exit");
    Options opts;
    std::string out_dir;
    double h = 0.0;
    std::uint64_t seed = 0;
    double s = 0.0;

    const char* names[] = {"constants", "eig", "sweep-neumann", "sweep-dirichlet", "bifurcate", "verify"};
    const char* help[] = {"print the normalization constant C_1,s", "principal eigenpairs",
                          "dissipating Neumann schedule", "dissipating Dirichlet schedule",
                          "continue the positive branch from zero", "run the verification battery"};
    std::vector<CLI::App*> subs;
    for (int i = 0; i < 6; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], help[i]);
        sub->set_help_flag("--help", "print this help and exit");
        sub->add_option("--config", opts.config_path, "configuration file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--h", h, "mesh size override");
        sub->add_option("--seed", seed, "seed override for randomized checks");
        sub->add_option("--s", s, "fractional order override");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--out")) opts.out_dir = out_dir;
    if (chosen->count("--h")) opts.h = h;
    if (chosen->count("--seed")) opts.seed = seed;
    if (chosen->count("--s")) opts.s = s;
    const std::string name = chosen->get_name();

    try {
        if (name == "constants") {
            return cmd_constants(opts, out);
        }
        Context ctx{name, opts, resolve_config(opts), opts.out_dir.value_or("out"), {}, out};
        std::filesystem::create_directories(ctx.out_dir);
        int code = kExitOk;
        if (name == "eig") {
            code = cmd_eig(ctx);
        } else if (name == "sweep-neumann") {
            code = cmd_sweep(ctx, true);
        } else if (name == "sweep-dirichlet") {
            code = cmd_sweep(ctx, false);
        } else if (name == "bifurcate") {
            code = cmd_bifurcate(ctx);
        } else {
            code = cmd_verify(ctx);
        }
        ctx.finish();
        return code;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const NumericalError& e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolverError;
    }
}

} // namespace mixnl

#include "cli_commands.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ballflow/curvature.hpp"
#include "ballflow/error.hpp"
#include "ballflow/flow.hpp"
#include "ballflow/io.hpp"
#include "ballflow/optimize.hpp"
#include "ballflow/triangulation.hpp"

namespace ballflow::cli {

namespace {

struct Common {
    std::string mesh;
    std::string radii;
    std::optional<double> uniform;
    std::string out;
    std::string manifest;
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    RunManifest manifest;
};

void add_packing_options(CLI::App* sub, Common& c) {
    auto* r = sub->add_option("--radii", c.radii, "radii file, one value per line");
    auto* u = sub->add_option("--uniform", c.uniform, "use the same radius for every vertex");
    r->excludes(u);
}

void add_output_options(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "write the result here (a manifest is written beside it)");
    sub->add_option("--manifest", c.manifest, "manifest path when writing to stdout (default: stderr)");
}

Triangulation load_mesh(const Common& c, Context& ctx) {
    const std::string text = read_text_file(c.mesh);
    ctx.manifest.set("input", c.mesh);
    ctx.manifest.set("input_digest", digest(text));
    return load_triangulation(text);
}

std::optional<PackingVector> load_packing(const Common& c, const Triangulation& t, Context& ctx) {
    std::optional<PackingVector> r;
    if (c.uniform) {
        r = PackingVector::uniform(t.num_vertices(), *c.uniform);
        ctx.manifest.set("radii", "uniform " + format_real(*c.uniform));
    } else if (!c.radii.empty()) {
        const std::string text = read_text_file(c.radii);
        r = parse_radii(text);
        ctx.manifest.set("radii", c.radii);
        ctx.manifest.set("radii_digest", digest(text));
    }
    if (r && r->size() != static_cast<std::size_t>(t.num_vertices()))
        throw InputError("radii file has " + std::to_string(r->size()) + " values but the triangulation has " +
                         std::to_string(t.num_vertices()) + " vertices");
    return r;
}

PackingVector require_packing(const Common& c, const Triangulation& t, Context& ctx) {
    auto r = load_packing(c, t, ctx);
    if (!r) throw InputError("a packing is required: pass --radii FILE or --uniform R");
    return *r;
}

void emit(const Common& c, Context& ctx, const std::string& body) {
    ctx.manifest.set("end", timestamp_now());
    if (!c.out.empty()) {
        write_text_file(c.out, body);
        write_text_file(RunManifest::path_for(c.out), ctx.manifest.text());
    } else {
        ctx.out << body;
        if (!c.manifest.empty())
            write_text_file(c.manifest, ctx.manifest.text());
        else
            ctx.err << ctx.manifest.text();
    }
}

int cmd_validate(const Common& c, Context& ctx) {
    const Triangulation t = load_mesh(c, ctx);
    const ValidationReport rep = validate(t);
    std::string body;
    body += "vertices " + std::to_string(t.num_vertices()) + "\n";
    body += "tetrahedra " + std::to_string(t.num_tetrahedra()) + "\n";
    body += "euler " + std::to_string(t.euler_characteristic()) + "\n";
    body += std::string("regular ") + (is_regular(t) ? "yes" : "no") + "\n";
    for (const Violation& v : rep.violations) body += "violation " + v.rule + " " + v.where + "\n";
    body += std::string("result ") + (rep.passed() ? "passed" : "failed") + "\n";
    emit(c, ctx, body);
    return rep.passed() ? kOk : kValidationFailed;
}

int cmd_curvature(const Common& c, bool extended, const std::string& format, Context& ctx) {
    const Triangulation t = load_mesh(c, ctx);
    const PackingVector r = require_packing(c, t, ctx);
    ctx.manifest.set("extended", extended ? "true" : "false");
    ctx.manifest.set("format", format);
    const CurvatureReport rep = extended ? extended_curvature(t, r) : curvature(t, r);
    emit(c, ctx, format == "csv" ? format_curvature_csv(rep, r) : format_curvature_report(rep, extended));
    return kOk;
}

struct FlowOptions {
    std::string mode = "extended";
    bool extended = false;
    std::string target;
    FlowConfig cfg;
};

int cmd_flow(const Common& c, FlowOptions& o, Context& ctx) {
    const Triangulation t = load_mesh(c, ctx);
    const PackingVector r0 = require_packing(c, t, ctx);
    FlowConfig cfg = o.cfg;
    cfg.mode = o.extended ? FlowMode::Extended : flow_mode_from_string(o.mode);
    if (!o.target.empty()) {
        const std::string text = read_text_file(o.target);
        cfg.target = parse_reals(text);
        ctx.manifest.set("target_curvature", o.target);
        ctx.manifest.set("target_digest", digest(text));
    }
    ctx.manifest.set("mode", to_string(cfg.mode));
    ctx.manifest.set("dt_init", cfg.dt_init);
    ctx.manifest.set("dt_min", cfg.dt_min);
    ctx.manifest.set("dt_max", cfg.dt_max);
    ctx.manifest.set("t_max", cfg.t_max);
    ctx.manifest.set("conv_tol", cfg.conv_tol);
    ctx.manifest.set("renormalize", cfg.renormalize ? "true" : "false");
    ctx.manifest.set("record_every", std::to_string(cfg.record_every));

    const FlowOutcome res = run(t, r0, cfg);
    const FlowRecord& last = res.trace.records.back();
    std::ostringstream summary;
    summary << "outcome " << to_string(res.status) << "\n";
    if (res.boundary)
        summary << "boundary " << to_string(res.boundary->kind) << " " << res.boundary->index << " t "
                << format_real(res.boundary->t) << "\n";
    summary << "final_lambda " << format_real(last.lambda) << "\n";
    summary << "residual " << format_real(res.residual) << "\n";
    summary << "steps " << res.steps << "\n";
    summary << "rejected " << res.rejected << "\n";
    summary << "records " << res.trace.records.size() << "\n";

    if (!c.out.empty()) {
        ctx.manifest.set("outcome", to_string(res.status));
        emit(c, ctx, format_trace_csv(res.trace));
        ctx.out << summary.str();
    } else {
        emit(c, ctx, summary.str());
    }
    switch (res.status) {
        case FlowStatus::Converged: return kOk;
        case FlowStatus::BoundaryHit: return kBoundaryHit;
        case FlowStatus::TimeLimit: return kTimeLimit;
    }
    return kInternalError;
}

struct MinOptions {
    MinimizeConfig cfg;
    std::string target;
    int starts = 1;
    std::uint64_t seed = 1;
    int rays = 64;
    int samples = 48;
};

void set_min_manifest(Context& ctx, const MinimizeConfig& cfg) {
    ctx.manifest.set("grad_tol", cfg.grad_tol);
    ctx.manifest.set("max_iters", std::to_string(cfg.max_iters));
    ctx.manifest.set("newton", cfg.newton ? "true" : "false");
}

std::string format_result(const MinimizeResult& res) {
    std::string body;
    body += "value " + format_real(res.value) + "\n";
    body += std::string("converged ") + (res.converged ? "true" : "false") + "\n";
    body += std::string("real ") + (res.is_real ? "true" : "false") + "\n";
    body += "iterations " + std::to_string(res.iterations) + "\n";
    body += "projected_gradient " + format_real(res.projected_grad_norm) + "\n";
    body += "stop " + res.stop_reason + "\n";
    for (std::size_t i = 0; i < res.r_star.size(); ++i)
        body += "r " + std::to_string(i) + " " + format_real(res.r_star[i]) + "\n";
    return body;
}

int cmd_minimize(const Common& c, MinOptions& o, Context& ctx) {
    const Triangulation t = load_mesh(c, ctx);
    o.cfg.r0 = load_packing(c, t, ctx);
    set_min_manifest(ctx, o.cfg);
    const MinimizeResult res = minimize_extended(t, o.cfg);
    emit(c, ctx, format_result(res));
    return res.converged ? kOk : kNotSolved;
}

int cmd_prescribed(const Common& c, MinOptions& o, Context& ctx) {
    const Triangulation t = load_mesh(c, ctx);
    o.cfg.r0 = load_packing(c, t, ctx);
    const std::string text = read_text_file(o.target);
    const std::vector<double> target = parse_reals(text);
    ctx.manifest.set("target_curvature", o.target);
    ctx.manifest.set("target_digest", digest(text));
    set_min_manifest(ctx, o.cfg);
    const MinimizeResult res = solve_prescribed(t, target, o.cfg);
    const bool solved = res.converged && res.is_real && res.curvature_error <= 1e-6;
    std::string body = format_result(res);
    body += "curvature_error " + format_real(res.curvature_error) + "\n";
    body += std::string("solved ") + (solved ? "true" : "false") + "\n";
    emit(c, ctx, body);
    return solved ? kOk : kNotSolved;
}

int cmd_invariant(const Common& c, MinOptions& o, Context& ctx) {
    const Triangulation t = load_mesh(c, ctx);
    o.cfg.r0 = load_packing(c, t, ctx);
    set_min_manifest(ctx, o.cfg);
    ctx.manifest.set("starts", std::to_string(o.starts));
    ctx.manifest.set("seed", std::to_string(o.seed));

    std::vector<MinimizeConfig> runs{o.cfg};
    if (o.starts > 1) {
        const double l1 = o.cfg.r0 ? o.cfg.r0->l1() : static_cast<double>(t.num_vertices());
        for (const PackingVector& r : random_starts(t.num_vertices(), o.starts - 1, l1, o.seed)) {
            MinimizeConfig cfg = o.cfg;
            cfg.r0 = r;
            runs.push_back(cfg);
        }
    }
    double best = std::numeric_limits<double>::infinity();
    double worst = -best;
    bool all_converged = true;
    for (const MinimizeConfig& cfg : runs) {
        const MinimizeResult res = minimize_extended(t, cfg);
        best = std::min(best, res.value);
        worst = std::max(worst, res.value);
        all_converged = all_converged && res.converged;
    }
    std::string body;
    body += "invariant " + format_real(best) + "\n";
    body += "spread " + format_real(worst - best) + "\n";
    body += "starts " + std::to_string(runs.size()) + "\n";
    body += std::string("converged ") + (all_converged ? "true" : "false") + "\n";
    emit(c, ctx, body);
    return all_converged ? kOk : kNotSolved;
}

int cmd_chi(const Common& c, MinOptions& o, Context& ctx) {
    const Triangulation t = load_mesh(c, ctx);
    std::optional<PackingVector> r_hat = load_packing(c, t, ctx);
    if (!r_hat) {
        const MinimizeResult m = minimize_extended(t, o.cfg);
        r_hat = m.r_star;
        ctx.manifest.set("radii", "minimizer");
        set_min_manifest(ctx, o.cfg);
    }
    ctx.manifest.set("rays", std::to_string(o.rays));
    ctx.manifest.set("samples", std::to_string(o.samples));
    ctx.manifest.set("seed", std::to_string(o.seed));
    const ChiEstimate est = chi_estimate(t, *r_hat, o.rays, o.samples, o.seed);
    std::string body;
    body += "chi_estimate " + format_real(est.value) + "\n";
    body += "lambda_hat " + format_real(est.lambda_hat) + "\n";
    body += "best_ray " + std::to_string(est.best_ray) + "\n";
    body += "rays " + std::to_string(est.n_rays) + "\n";
    body += "samples " + std::to_string(est.n_samples) + "\n";
    body += "seed " + std::to_string(est.seed) + "\n";
    emit(c, ctx, body);
    return kOk;
}

void add_min_options(CLI::App* sub, MinOptions& o) {
    sub->add_option("--grad-tol", o.cfg.grad_tol, "projected gradient tolerance");
    sub->add_option("--max-iters", o.cfg.max_iters, "iteration limit");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ball packing curvature flows on triangulated 3-manifolds", "ballflow"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common c;
    bool extended = false;
    std::string format = "text";
    FlowOptions fo;
    MinOptions mo;

    auto* val = app.add_subcommand("validate", "check a triangulation file");
    val->add_option("file", c.mesh)->required();
    add_output_options(val, c);

    auto* cur = app.add_subcommand("curvature", "vertex curvature of a packing");
    cur->add_option("file", c.mesh)->required();
    add_packing_options(cur, c);
    cur->add_flag("--extended", extended, "use the extended curvature");
    cur->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}));
    add_output_options(cur, c);

    auto* flow = app.add_subcommand("flow", "integrate a curvature flow");
    flow->add_option("file", c.mesh)->required();
    add_packing_options(flow, c);
    flow->add_option("--mode", fo.mode)->check(CLI::IsMember({"normalized", "extended", "prescribed", "prescribed-extended"}));
    flow->add_flag("--extended", fo.extended, "shorthand for --mode extended");
    flow->add_option("--target-curvature", fo.target, "prescribed curvature file");
    flow->add_option("--dt-init", fo.cfg.dt_init, "initial step size");
    flow->add_option("--dt-min", fo.cfg.dt_min, "smallest step before giving up");
    flow->add_option("--dt-max", fo.cfg.dt_max, "largest step");
    flow->add_option("--t-max", fo.cfg.t_max, "stop at this flow time");
    flow->add_option("--tol", fo.cfg.conv_tol, "convergence tolerance on the residual");
    flow->add_flag("--renormalize", fo.cfg.renormalize, "rescale to the initial l1 norm after each step");
    flow->add_option("--record-every", fo.cfg.record_every, "keep every n-th accepted step in the trace");
    add_output_options(flow, c);

    auto* mini = app.add_subcommand("minimize", "minimize the extended CRG functional");
    mini->add_option("file", c.mesh)->required();
    add_packing_options(mini, c);
    add_min_options(mini, mo);
    add_output_options(mini, c);

    auto* pres = app.add_subcommand("prescribed", "solve for a packing with prescribed curvature");
    pres->add_option("file", c.mesh)->required();
    add_packing_options(pres, c);
    pres->add_option("--target-curvature", mo.target)->required();
    add_min_options(pres, mo);
    add_output_options(pres, c);

    auto* inv = app.add_subcommand("invariant", "estimate the minimum of the extended CRG functional");
    inv->add_option("file", c.mesh)->required();
    add_packing_options(inv, c);
    inv->add_option("--starts", mo.starts, "number of starting packings")->check(CLI::PositiveNumber);
    inv->add_option("--seed", mo.seed);
    add_min_options(inv, mo);
    add_output_options(inv, c);

    auto* chi = app.add_subcommand("chi-estimate", "sample rays for the energy gap estimate");
    chi->add_option("file", c.mesh)->required();
    add_packing_options(chi, c);
    chi->add_option("--rays", mo.rays)->check(CLI::PositiveNumber);
    chi->add_option("--samples", mo.samples)->check(CLI::Range(2, 1000000));
    chi->add_option("--seed", mo.seed);
    add_min_options(chi, mo);
    add_output_options(chi, c);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    Context ctx{out, err, {}};
    CLI::App* sub = app.get_subcommands().front();
    ctx.manifest.set("command", sub->get_name());
    ctx.manifest.set("version", kVersion);
    ctx.manifest.set("start", timestamp_now());
    try {
        if (sub == val) return cmd_validate(c, ctx);
        if (sub == cur) return cmd_curvature(c, extended, format, ctx);
        if (sub == flow) return cmd_flow(c, fo, ctx);
        if (sub == mini) return cmd_minimize(c, mo, ctx);
        if (sub == pres) return cmd_prescribed(c, mo, ctx);
        if (sub == inv) return cmd_invariant(c, mo, ctx);
        if (sub == chi) return cmd_chi(c, mo, ctx);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const VirtualPackingError& e) {
        err << "virtual packing: " << e.what() << "\n";
        err << "tetrahedron " << e.tet() << " apex " << e.apex() << "\n";
        return kVirtualPacking;
    } catch (const GeometryError& e) {
        err << "geometry error: " << e.what() << "\n";
        return kGeometryError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternalError;
    }
    return kInternalError;
}

}  // namespace ballflow::cli

// Command-line driver: builds disk maps of slit domains, solves the mixed
// boundary value problem through its Riemann-Hilbert form, evaluates fields
// and energies, and runs quasi-static propagation steps.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "fracmap/elastic_fields.hpp"
#include "fracmap/scenario.hpp"

using namespace fracmap;
using nlohmann::json;
using clock_type = std::chrono::steady_clock;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunContext {
    cli::ScenarioConfig cfg;
    std::filesystem::path out;
    std::string hash_hex;
    json timings;
    clock_type::time_point t0 = clock_type::now();

    void mark(const std::string& stage)
    {
        timings[stage] =
            std::chrono::duration<double>(clock_type::now() - t0).count();
    }

    void write_manifest(const std::string& command) const
    {
        json m;
        m["tool_version"] = kVersion;
        m["command"] = command;
        m["config_hash"] = hash_hex;
        m["tolerances"] = {{"map_residual_rel", cfg.map_residual_rel},
                           {"quad_tol", cfg.quad_tol},
                           {"jump_tol_rel", cfg.jump_tol_rel},
                           {"series_len", cfg.series_len},
                           {"surrogate_degree", cfg.surrogate_degree}};
        m["timings_s"] = timings;
        std::ofstream(out / (command + "_manifest.json")) << m.dump(2) << "\n";
    }
};

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// boundary data per the configured spec, over a finished map
rh::BoundaryData make_boundary_data(const cli::ScenarioConfig& cfg,
                                    std::shared_ptr<const conf::DiskMap> map)
{
    using Kind = cli::BoundarySpec::Kind;
    if (cfg.boundary.kind == Kind::mode_i) {
        fields::ModeIField f;
        f.p = cfg.boundary.p;
        f.a = cfg.boundary.a;
        f.mat = cfg.material;
        f.tip = cfg.domain.crack.tip();
        f.dir = cfg.domain.crack.tip_direction();
        return f.boundary_data(std::move(map));
    }
    // tabulated data: CSV rows theta,<two columns>, periodic linear interp
    std::ifstream in(cfg.boundary.file);
    std::vector<double> th;
    std::vector<cplx> val;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        double a, b, c;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c) == 3) {
            th.push_back(wrap_2pi(a));
            val.push_back({b, c});
        }
    }
    if (th.size() < 4)
        throw config_error("tabulated boundary file needs >= 4 rows");
    // sort by angle
    std::vector<size_t> idx(th.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](size_t a2, size_t b2) { return th[a2] < th[b2]; });
    auto tt = std::make_shared<std::vector<double>>();
    auto vv = std::make_shared<std::vector<cplx>>();
    for (size_t i : idx) {
        tt->push_back(th[i]);
        vv->push_back(val[i]);
    }
    auto interp = [tt, vv](double ang) -> cplx {
        const double a = wrap_2pi(ang);
        const auto& T = *tt;
        const auto& V = *vv;
        const size_t n = T.size();
        size_t hi = std::lower_bound(T.begin(), T.end(), a) - T.begin();
        const size_t lo = (hi + n - 1) % n;
        hi = hi % n;
        double span = T[hi] - T[lo];
        if (span <= 0) span += 2.0 * pi;
        double frac = a - T[lo];
        if (frac < 0) frac += 2.0 * pi;
        return V[lo] + (V[hi] - V[lo]) * (frac / span);
    };
    if (cfg.boundary.kind == Kind::tabulated_displacement) {
        rh::BoundaryData d;
        d.u_star = interp;
        d.du_star_dtheta = [interp](double ang) {
            const double h = 1e-5;
            return (interp(ang + h) - interp(ang - h)) / (2.0 * h);
        };
        return d;
    }
    // tabulated tractions act on the crack faces; the interface is held fixed
    rh::BoundaryData d;
    d.u_star = [](double) { return cplx{0.0, 0.0}; };
    d.du_star_dtheta = [](double) { return cplx{0.0, 0.0}; };
    d.sigma_star = interp;
    return d;
}

struct Solved {
    std::shared_ptr<const conf::ConformalDiskMap> map;
    geo::SlitPolygon polygon;
    rh::RiemannHilbertSolution solution;
};

Solved solve_current(RunContext& ctx)
{
    auto sc = ctx.cfg.scenario();
    auto map = sc.map_for(ctx.cfg.domain.crack);
    ctx.mark("map");
    auto poly = geo::widen_slit(ctx.cfg.domain);
    auto part = rh::BoundaryPartition::from_slit_map(*map, poly.slit_vertex_count);
    auto data = make_boundary_data(ctx.cfg, map);
    auto sol = rh::solve(map, part, ctx.cfg.material, data, sc.solver_options);
    ctx.mark("solve");
    return {map, poly, std::move(sol)};
}

void write_map_json(const RunContext& ctx, const conf::ConformalDiskMap& map)
{
    json j;
    j["config_hash"] = ctx.hash_hex;
    j["map"] = json::parse(map.to_json());
    std::ofstream(ctx.out / "map.json") << j.dump(2) << "\n";
}

void write_solution_json(const RunContext& ctx,
                         const rh::RiemannHilbertSolution& sol)
{
    json j;
    j["config_hash"] = ctx.hash_hex;
    j["solution"] = json::parse(sol.to_json());
    const auto rep = sol.jump_residual();
    j["solution"]["jump_residual"] = {{"gamma_sigma", rep.sigma_max},
                                      {"gamma_u", rep.u_max},
                                      {"scale", rep.scale}};
    std::ofstream(ctx.out / "solution.json") << j.dump(2) << "\n";
}

void write_energy_csv(const RunContext& ctx,
                      const std::vector<energy::StepRecord>& steps)
{
    std::ofstream os(ctx.out / "energy.csv");
    os << "# config_hash=" << ctx.hash_hex << "\n";
    os << "step,theta,d,EA,WA,D,Etot,feasible,chosen\n";
    os.precision(17);
    for (const auto& st : steps)
        for (const auto& c : st.table)
            os << st.step << ',' << c.theta << ',' << c.d << ',' << c.energy.e_a
               << ',' << c.energy.w_a << ',' << c.energy.d << ','
               << c.energy.e_tot << ',' << (c.feasible ? 1 : 0) << ','
               << (c.chosen ? 1 : 0) << "\n";
}

json history_json(const energy::PropagationHistory& hist)
{
    json h;
    h["complete"] = hist.complete;
    if (!hist.abort_reason.empty()) h["abort_reason"] = hist.abort_reason;
    h["steps"] = json::array();
    for (const auto& st : hist.steps) {
        json s;
        s["step"] = st.step;
        s["load"] = st.load;
        s["theta_star"] = st.theta_star;
        s["d_star"] = st.d_star;
        s["chosen"] = {{"EA", st.chosen_energy.e_a},
                       {"WA", st.chosen_energy.w_a},
                       {"D", st.chosen_energy.d},
                       {"Etot", st.chosen_energy.e_tot}};
        s["crack_points"] = json::array();
        for (cplx p : st.path_after.points)
            s["crack_points"].push_back({p.real(), p.imag()});
        s["candidates"] = json::array();
        for (const auto& c : st.table)
            s["candidates"].push_back({{"theta", c.theta},
                                       {"d", c.d},
                                       {"EA", c.energy.e_a},
                                       {"WA", c.energy.w_a},
                                       {"D", c.energy.d},
                                       {"Etot", c.energy.e_tot},
                                       {"feasible", c.feasible},
                                       {"chosen", c.chosen},
                                       {"error", c.error}});
        h["steps"].push_back(std::move(s));
    }
    return h;
}

int cmd_map(RunContext& ctx)
{
    auto sc = ctx.cfg.scenario();
    auto map = sc.map_for(ctx.cfg.domain.crack);
    ctx.mark("map");
    write_map_json(ctx, *map);
    ctx.write_manifest("map");
    std::cout << "map: residual " << map->residual() << ", surrogate error "
              << map->taylor_error() << "\n";
    return 0;
}

int cmd_solve(RunContext& ctx)
{
    auto s = solve_current(ctx);
    write_map_json(ctx, *s.map);
    write_solution_json(ctx, s.solution);
    ctx.mark("write");
    ctx.write_manifest("solve");
    const auto rep = s.solution.jump_residual();
    std::cout << "solve: jump residuals " << rep.sigma_max << " (faces), "
              << rep.u_max << " (interface), scale " << rep.scale << "\n";
    return 0;
}

int cmd_fields(RunContext& ctx)
{
    auto s = solve_current(ctx);
    fields::FieldEvaluator ev(s.solution);
    fields::FieldGridSpec spec;
    spec.radial = ctx.cfg.field_grid.radial;
    spec.angular = ctx.cfg.field_grid.angular;
    spec.r_max = std::min(ctx.cfg.field_grid.r_max, s.solution.series_radius());
    std::ofstream os(ctx.out / "fields.csv");
    os << "# config_hash=" << ctx.hash_hex << "\n";
    fields::write_field_csv(os, ev, fields::make_grid(spec));
    ctx.mark("fields");
    ctx.write_manifest("fields");
    std::cout << "fields: wrote " << spec.radial * spec.angular << " samples\n";
    return 0;
}

int cmd_energy(RunContext& ctx)
{
    ctx.cfg.material.validate(true);
    auto sc = ctx.cfg.scenario();
    auto c = energy::evaluate_candidate(sc, sc.schedule.multipliers.at(0), 0.0, 0.0);
    ctx.mark("energy");
    energy::StepRecord rec;
    rec.step = 1;
    rec.load = sc.schedule.multipliers.at(0);
    c.chosen = true;
    rec.table.push_back(c);
    write_energy_csv(ctx, {rec});
    ctx.write_manifest("energy");
    if (!c.feasible) {
        std::cerr << "energy: evaluation failed: " << c.error << "\n";
        return 2;
    }
    std::cout << "energy: EA " << c.energy.e_a << ", WA " << c.energy.w_a
              << ", D " << c.energy.d << ", Etot " << c.energy.e_tot << "\n";
    return 0;
}

int cmd_propagate(RunContext& ctx)
{
    ctx.cfg.material.validate(true);
    auto sc = ctx.cfg.scenario();
    auto hist = energy::run(sc);
    ctx.mark("propagate");
    write_energy_csv(ctx, hist.steps);
    json h = history_json(hist);
    h["config_hash"] = ctx.hash_hex;
    std::ofstream(ctx.out / "history.json") << h.dump(2) << "\n";
    ctx.write_manifest("propagate");
    for (const auto& st : hist.steps)
        std::cout << "step " << st.step << ": load " << st.load << " -> theta* "
                  << st.theta_star << ", d* " << st.d_star << ", Etot "
                  << st.chosen_energy.e_tot << "\n";
    if (!hist.complete) {
        std::cerr << "propagate aborted: " << hist.abort_reason << "\n";
        return 2;
    }
    return 0;
}

int cmd_verify(RunContext& ctx)
{
    json rep;
    rep["config_hash"] = ctx.hash_hex;
    auto s = solve_current(ctx);
    rep["map_residual"] = s.map->residual();
    rep["surrogate_error"] = s.map->taylor_error();

    // crowding of the slit-corner prevertex cluster
    const auto& z = s.map->prevertices();
    const int nslit = s.polygon.slit_vertex_count;
    double mingap = std::numeric_limits<double>::max();
    for (int i = 0; i < nslit; ++i)
        for (int j = i + 1; j < nslit; ++j)
            mingap = std::min(mingap, std::abs(z[i] - z[j]));
    rep["slit_prevertex_min_gap"] = mingap;

    const auto jr = s.solution.jump_residual();
    rep["jump_residual"] = {{"gamma_sigma", jr.sigma_max},
                            {"gamma_u", jr.u_max},
                            {"scale", jr.scale}};

    std::cout << "verify: map residual " << s.map->residual() << "\n";
    std::cout << "verify: slit prevertex min gap " << mingap << "\n";
    std::cout << "verify: jump residuals " << jr.sigma_max << " / " << jr.u_max
              << " (scale " << jr.scale << ")\n";

    if (ctx.cfg.boundary.kind == cli::BoundarySpec::Kind::mode_i) {
        fields::FieldEvaluator ev(s.solution);
        fields::ModeIField ref;
        ref.p = ctx.cfg.boundary.p;
        ref.a = ctx.cfg.boundary.a;
        ref.mat = ctx.cfg.material;
        ref.tip = ctx.cfg.domain.crack.tip();
        ref.dir = ctx.cfg.domain.crack.tip_direction();
        double num = 0.0, den = 0.0;
        int used = 0;
        const double rmin = 0.1 * ctx.cfg.domain.size;
        for (int ir = 1; ir <= 14; ++ir) {
            const double r = 0.07 * ir;
            for (int j = 0; j < 48; ++j) {
                const cplx zeta = r * unit(2.0 * pi * (j + 0.5) / 48.0);
                const cplx zz = s.solution.omega_series_point(zeta);
                if (std::abs(zz - ref.tip) < rmin) continue;
                const cplx got = ev.displacement_at(zeta);
                const cplx want = ref.displacement(zz);
                num += std::norm(got - want);
                den += std::norm(want);
                ++used;
            }
        }
        const double l2 = std::sqrt(num / den);
        rep["displacement_l2_rel_error"] = l2;
        rep["displacement_samples"] = used;
        std::cout << "verify: displacement L2 relative error " << l2 << " over "
                  << used << " samples\n";

        // energy bookkeeping sanity: with fixed interface displacements the
        // interface work should approach twice the stored energy
        auto sc2 = ctx.cfg.scenario();
        auto cand = energy::evaluate_candidate(sc2, 1.0, 0.0, 0.0);
        if (cand.feasible) {
            rep["EA"] = cand.energy.e_a;
            rep["WA"] = cand.energy.w_a;
            rep["clapeyron_gap_rel"] =
                std::abs(cand.energy.w_a - 2.0 * cand.energy.e_a) /
                std::max(1e-300, 2.0 * cand.energy.e_a);
            std::cout << "verify: EA " << cand.energy.e_a << ", WA "
                      << cand.energy.w_a << " (Clapeyron gap "
                      << rep["clapeyron_gap_rel"].get<double>() << ")\n";
        }
    }
    ctx.mark("verify");
    std::ofstream(ctx.out / "verify.json") << rep.dump(2) << "\n";
    ctx.write_manifest("verify");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"plane-elastic slit domains: disk maps, Riemann-Hilbert "
                 "solutions, energetic crack steps"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "scenario configuration (JSON)")
        ->required();
    app.add_option("--out-dir", out_dir, "output directory (default ./out)");
    app.add_option("--threads", threads, "worker threads for candidate sweeps");
    app.add_option("--tol-override", overrides, "override tolerance key=value");

    auto* c_map = app.add_subcommand("map", "build and export the disk map");
    auto* c_solve = app.add_subcommand("solve", "solve the boundary value problem");
    auto* c_fields = app.add_subcommand("fields", "evaluate the field grid");
    auto* c_energy = app.add_subcommand("energy", "energies of the current crack");
    auto* c_prop = app.add_subcommand("propagate", "run the load schedule");
    auto* c_verify = app.add_subcommand("verify", "model-quality report");

    CLI11_PARSE(app, argc, argv);

    RunContext ctx;
    try {
        ctx.cfg = cli::load_config(config_path);
        for (const auto& ov : overrides) cli::apply_override(ctx.cfg, ov);
        if (!out_dir.empty()) ctx.cfg.out_dir = out_dir;
        if (threads > 0) ctx.cfg.threads = threads;
        ctx.out = ctx.cfg.out_dir;
        std::filesystem::create_directories(ctx.out);
        ctx.hash_hex = hex64(ctx.cfg.hash());
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (c_map->parsed()) return cmd_map(ctx);
        if (c_solve->parsed()) return cmd_solve(ctx);
        if (c_fields->parsed()) return cmd_fields(ctx);
        if (c_energy->parsed()) return cmd_energy(ctx);
        if (c_prop->parsed()) return cmd_propagate(ctx);
        if (c_verify->parsed()) return cmd_verify(ctx);
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const geometry_error& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

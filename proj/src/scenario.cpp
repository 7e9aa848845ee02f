#include "fracmap/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace fracmap::cli {

using nlohmann::json;

namespace {

void check_keys(const json& node, const std::string& path,
                std::initializer_list<const char*> allowed,
                std::vector<std::string>& errors)
{
    for (auto it = node.begin(); it != node.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) errors.push_back("unknown key '" + path + it.key() + "'");
    }
}

template <typename T>
T get_or(const json& node, const char* key, T fallback)
{
    if (node.contains(key)) return node.at(key).get<T>();
    return fallback;
}

} // namespace

ScenarioConfig parse_config(const std::string& text)
{
    std::vector<std::string> errors;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }

    ScenarioConfig cfg;
    check_keys(j, "",
               {"geometry", "material", "boundary", "load_schedule",
                "candidate_grid", "tolerances", "output", "seed", "threads"},
               errors);

    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        check_keys(g, "geometry.",
                   {"outer_shape", "size_m", "disk_vertices", "center_m",
                    "crack_points_m", "slit_half_width_m", "normalization_frac"},
                   errors);
        const std::string shape = get_or<std::string>(g, "outer_shape", "square");
        if (shape == "square")
            cfg.domain.shape = geo::OuterShape::square;
        else if (shape == "disk")
            cfg.domain.shape = geo::OuterShape::disk;
        else
            errors.push_back("geometry.outer_shape must be 'square' or 'disk'");
        cfg.domain.size = get_or<double>(g, "size_m", 20.0);
        cfg.domain.disk_vertices = get_or<int>(g, "disk_vertices", 64);
        if (g.contains("center_m")) {
            auto c = g["center_m"].get<std::vector<double>>();
            if (c.size() == 2) cfg.domain.center = {c[0], c[1]};
            else errors.push_back("geometry.center_m needs two entries");
        }
        if (g.contains("crack_points_m")) {
            for (const auto& p : g["crack_points_m"]) {
                auto v = p.get<std::vector<double>>();
                if (v.size() != 2) {
                    errors.push_back("geometry.crack_points_m entries need [x, y]");
                    break;
                }
                cfg.domain.crack.points.push_back({v[0], v[1]});
            }
        } else {
            errors.push_back("geometry.crack_points_m is required");
        }
        if (g.contains("slit_half_width_m")) {
            cfg.domain.slit_half_width = g["slit_half_width_m"].get<double>();
        } else {
            // default scales the ~1e-4 reference width with the domain extent
            const double extent = cfg.domain.shape == geo::OuterShape::square
                                      ? cfg.domain.size
                                      : 2.0 * cfg.domain.size;
            cfg.domain.slit_half_width = 1e-4 * extent / 20.0;
            cfg.slit_width_defaulted = true;
        }
        cfg.normalization_frac = get_or<double>(g, "normalization_frac", 0.7);
        if (cfg.normalization_frac <= 0.0 || cfg.normalization_frac >= 1.0)
            errors.push_back("geometry.normalization_frac must lie in (0, 1)");
    } else {
        errors.push_back("geometry section is required");
    }

    if (j.contains("material")) {
        const auto& m = j["material"];
        check_keys(m, "material.", {"mu_pa", "kappa", "lambda_pa", "g_c_j_per_m2"},
                   errors);
        cfg.material.mu = get_or<double>(m, "mu_pa", 1.0);
        if (m.contains("kappa")) cfg.material.kappa = m["kappa"].get<double>();
        if (m.contains("lambda_pa")) {
            cfg.material.lambda = m["lambda_pa"].get<double>();
            if (!m.contains("kappa")) {
                const double nu =
                    cfg.material.lambda / (2.0 * (cfg.material.lambda + cfg.material.mu));
                cfg.material.kappa = 3.0 - 4.0 * nu; // plane strain
            }
        }
        if (m.contains("g_c_j_per_m2"))
            cfg.material.g_c = m["g_c_j_per_m2"].get<double>();
        try {
            cfg.material.validate(false);
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
    } else {
        errors.push_back("material section is required");
    }

    if (j.contains("boundary")) {
        const auto& b = j["boundary"];
        check_keys(b, "boundary.", {"type", "p_pa", "a_m", "file"}, errors);
        const std::string type = get_or<std::string>(b, "type", "mode_i");
        if (type == "mode_i") {
            cfg.boundary.kind = BoundarySpec::Kind::mode_i;
            cfg.boundary.p = get_or<double>(b, "p_pa", 1.0);
            cfg.boundary.a = get_or<double>(b, "a_m", 1.0);
        } else if (type == "tabulated_displacement" ||
                   type == "tabulated_traction") {
            cfg.boundary.kind = type == "tabulated_displacement"
                                    ? BoundarySpec::Kind::tabulated_displacement
                                    : BoundarySpec::Kind::tabulated_traction;
            if (!b.contains("file")) {
                errors.push_back("boundary.file is required for tabulated data");
            } else {
                cfg.boundary.file = b["file"].get<std::string>();
                if (!std::filesystem::exists(cfg.boundary.file))
                    errors.push_back("boundary.file does not exist: " +
                                     cfg.boundary.file.string());
            }
        } else {
            errors.push_back("boundary.type must be mode_i, "
                             "tabulated_displacement or tabulated_traction");
        }
    }

    if (j.contains("load_schedule")) {
        cfg.load_schedule = j["load_schedule"].get<std::vector<double>>();
        if (cfg.load_schedule.empty())
            errors.push_back("load_schedule needs at least one multiplier");
    }

    if (j.contains("candidate_grid")) {
        const auto& c = j["candidate_grid"];
        check_keys(c, "candidate_grid.", {"angle_count", "lengths_m"}, errors);
        cfg.angle_count = get_or<int>(c, "angle_count", 18);
        if (cfg.angle_count < 2 || cfg.angle_count % 2 != 0)
            errors.push_back("candidate_grid.angle_count must be even and >= 2");
        if (c.contains("lengths_m"))
            cfg.candidate_lengths = c["lengths_m"].get<std::vector<double>>();
    }

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        check_keys(t, "tolerances.",
                   {"map_residual_rel", "quad_tol", "jump_tol_rel", "series_len",
                    "surrogate_degree", "surrogate_terms", "fft_size",
                    "energy_radial", "energy_angular"},
                   errors);
        cfg.map_residual_rel = get_or<double>(t, "map_residual_rel", 1e-6);
        cfg.quad_tol = get_or<double>(t, "quad_tol", 1e-11);
        cfg.jump_tol_rel = get_or<double>(t, "jump_tol_rel", 1e-3);
        cfg.series_len = get_or<int>(t, "series_len", 768);
        cfg.surrogate_degree = get_or<int>(t, "surrogate_degree", 128);
        cfg.surrogate_terms = get_or<int>(t, "surrogate_terms", 128);
        cfg.fft_size = get_or<int>(t, "fft_size", 8192);
        cfg.energy_radial = get_or<int>(t, "energy_radial", 20);
        cfg.energy_angular = get_or<int>(t, "energy_angular", 96);
    }

    if (j.contains("output")) {
        const auto& o = j["output"];
        check_keys(o, "output.", {"dir", "field_radial", "field_angular",
                                  "field_r_max"},
                   errors);
        cfg.out_dir = get_or<std::string>(o, "dir", "./out");
        cfg.field_grid.radial = get_or<int>(o, "field_radial", 24);
        cfg.field_grid.angular = get_or<int>(o, "field_angular", 96);
        cfg.field_grid.r_max = get_or<double>(o, "field_r_max", 0.97);
    }

    cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
    cfg.threads = get_or<int>(j, "threads", 1);

    // geometric invariants
    if (errors.empty()) {
        try {
            cfg.domain.validate();
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
    }

    if (!errors.empty()) {
        std::ostringstream os;
        os << "config validation failed:";
        for (const auto& e : errors) os << "\n  - " << e;
        throw config_error(os.str());
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) throw config_error("cannot open config file: " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string ScenarioConfig::serialize() const
{
    json j;
    j["geometry"]["outer_shape"] =
        domain.shape == geo::OuterShape::square ? "square" : "disk";
    j["geometry"]["size_m"] = domain.size;
    j["geometry"]["disk_vertices"] = domain.disk_vertices;
    j["geometry"]["center_m"] = {domain.center.real(), domain.center.imag()};
    auto& pts = j["geometry"]["crack_points_m"];
    for (cplx p : domain.crack.points) pts.push_back({p.real(), p.imag()});
    j["geometry"]["slit_half_width_m"] = domain.slit_half_width;
    j["geometry"]["normalization_frac"] = normalization_frac;
    j["material"]["mu_pa"] = material.mu;
    j["material"]["kappa"] = material.kappa;
    if (!std::isnan(material.lambda)) j["material"]["lambda_pa"] = material.lambda;
    if (!std::isnan(material.g_c)) j["material"]["g_c_j_per_m2"] = material.g_c;
    switch (boundary.kind) {
    case BoundarySpec::Kind::mode_i:
        j["boundary"]["type"] = "mode_i";
        j["boundary"]["p_pa"] = boundary.p;
        j["boundary"]["a_m"] = boundary.a;
        break;
    case BoundarySpec::Kind::tabulated_displacement:
        j["boundary"]["type"] = "tabulated_displacement";
        j["boundary"]["file"] = boundary.file.string();
        break;
    case BoundarySpec::Kind::tabulated_traction:
        j["boundary"]["type"] = "tabulated_traction";
        j["boundary"]["file"] = boundary.file.string();
        break;
    }
    j["load_schedule"] = load_schedule;
    j["candidate_grid"]["angle_count"] = angle_count;
    if (!candidate_lengths.empty())
        j["candidate_grid"]["lengths_m"] = candidate_lengths;
    j["tolerances"]["map_residual_rel"] = map_residual_rel;
    j["tolerances"]["quad_tol"] = quad_tol;
    j["tolerances"]["jump_tol_rel"] = jump_tol_rel;
    j["tolerances"]["series_len"] = series_len;
    j["tolerances"]["surrogate_degree"] = surrogate_degree;
    j["tolerances"]["surrogate_terms"] = surrogate_terms;
    j["tolerances"]["fft_size"] = fft_size;
    j["tolerances"]["energy_radial"] = energy_radial;
    j["tolerances"]["energy_angular"] = energy_angular;
    j["output"]["field_radial"] = field_grid.radial;
    j["output"]["field_angular"] = field_grid.angular;
    j["output"]["field_r_max"] = field_grid.r_max;
    j["seed"] = seed;
    j["threads"] = threads;
    return j.dump(2);
}

std::uint64_t ScenarioConfig::hash() const
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : serialize()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

energy::Scenario ScenarioConfig::scenario() const
{
    energy::Scenario sc;
    sc.domain = domain;
    sc.material = material;
    if (boundary.kind != BoundarySpec::Kind::mode_i)
        throw config_error(
            "tabulated boundary data drives solve/fields only; the propagation "
            "scenario needs the mode_i reference load");
    sc.base_load.p = boundary.p;
    sc.base_load.a = boundary.a;
    sc.base_load.mat = material;
    sc.base_load.tip = domain.crack.tip();
    sc.base_load.dir = domain.crack.tip_direction();
    sc.schedule.multipliers = load_schedule;
    sc.grid.angles.clear();
    for (int k = 0; k <= angle_count; ++k)
        sc.grid.angles.push_back(-0.5 * pi + pi * k / angle_count);
    sc.grid.angles[angle_count / 2] = 0.0;
    if (candidate_lengths.empty()) {
        const double dmin = domain.size / 100.0;
        sc.grid.lengths = {0.0, dmin, 2.0 * dmin, 4.0 * dmin};
    } else {
        sc.grid.lengths = candidate_lengths;
    }
    sc.map_options.surrogate_degree = surrogate_degree;
    sc.map_options.fft_size = fft_size;
    sc.solver_options.series_len = series_len;
    sc.solver_options.max_surrogate_terms = surrogate_terms;
    sc.solver_options.quad_tol = quad_tol;
    sc.map_tolerance = map_residual_rel;
    sc.energy_options.radial = energy_radial;
    sc.energy_options.angular = energy_angular;
    sc.threads = threads;
    // normalization point: normalization_frac of the way from the tip to the
    // far boundary along the tip heading
    const cplx tip = domain.crack.tip();
    const cplx dir = domain.crack.tip_direction();
    double lo = 0.0, hi = domain.diameter();
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (domain.boundary_clearance(tip + mid * dir) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    sc.normalization = tip + normalization_frac * lo * dir;
    return sc;
}

void apply_override(ScenarioConfig& cfg, const std::string& spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw config_error("--tol-override expects key=value, got: " + spec);
    const std::string key = spec.substr(0, eq);
    const std::string val = spec.substr(eq + 1);
    auto as_d = [&] { return std::stod(val); };
    auto as_i = [&] { return std::stoi(val); };
    if (key == "map_residual_rel") cfg.map_residual_rel = as_d();
    else if (key == "quad_tol") cfg.quad_tol = as_d();
    else if (key == "jump_tol_rel") cfg.jump_tol_rel = as_d();
    else if (key == "series_len") cfg.series_len = as_i();
    else if (key == "surrogate_degree") cfg.surrogate_degree = as_i();
    else if (key == "surrogate_terms") cfg.surrogate_terms = as_i();
    else if (key == "fft_size") cfg.fft_size = as_i();
    else if (key == "energy_radial") cfg.energy_radial = as_i();
    else if (key == "energy_angular") cfg.energy_angular = as_i();
    else throw config_error("--tol-override: unknown key '" + key + "'");
}

} // namespace fracmap::cli

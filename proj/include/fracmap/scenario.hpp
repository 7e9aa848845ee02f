#ifndef FRACMAP_SCENARIO_HPP
#define FRACMAP_SCENARIO_HPP

#include <filesystem>
#include <optional>

#include "fracmap/energy.hpp"

namespace fracmap::cli {

struct FieldGridConfig {
    int radial = 24;
    int angular = 96;
    double r_max = 0.97;
};

struct BoundarySpec {
    enum class Kind { mode_i, tabulated_displacement, tabulated_traction };
    Kind kind = Kind::mode_i;
    double p = 1.0; // applied stress scale of the opening reference field
    double a = 1.0; // half-length of the reference crack
    std::filesystem::path file; // for tabulated data
};

struct ScenarioConfig {
    geo::AnalyticalDomain domain;
    bool slit_width_defaulted = false;
    double normalization_frac = 0.7; // tip -> far boundary, along the heading
    rh::MaterialParams material;
    BoundarySpec boundary;
    std::vector<double> load_schedule{1.0};
    int angle_count = 18; // N: the grid carries N+1 angles
    std::vector<double> candidate_lengths; // empty: default rule
    // tolerances and discretization
    double map_residual_rel = 1e-6;
    double quad_tol = 1e-11;
    double jump_tol_rel = 1e-3;
    int series_len = 768;
    int surrogate_degree = 128;
    int surrogate_terms = 128;
    int fft_size = 8192;
    int energy_radial = 20;
    int energy_angular = 96;
    FieldGridConfig field_grid;
    std::filesystem::path out_dir = "./out";
    std::uint64_t seed = 1;
    int threads = 1;

    std::string serialize() const;        // canonical form, full precision
    std::uint64_t hash() const;           // FNV-1a of the canonical form
    energy::Scenario scenario() const;    // assembled solver-facing scenario
};

// Parse and validate; collects every violation before failing.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& file);

// Apply a --tol-override entry of the form key=value.
void apply_override(ScenarioConfig& cfg, const std::string& spec);

} // namespace fracmap::cli

#endif

#ifndef FRACMAP_ENERGY_HPP
#define FRACMAP_ENERGY_HPP

#include <map>
#include <mutex>
#include <string>

#include "fracmap/elastic_fields.hpp"

namespace fracmap::energy {

struct LoadSchedule {
    std::vector<double> multipliers; // s_j applied to the base boundary data
    void validate() const;
};

struct CandidateGrid {
    std::vector<double> angles;  // symmetric about 0, contains 0
    std::vector<double> lengths; // contains 0
    void validate() const;
    static CandidateGrid defaults(double domain_size);
};

struct EnergyBreakdown {
    double e_a = 0.0;  // stored elastic energy
    double w_a = 0.0;  // interface work
    double d = 0.0;    // dissipated energy, G_c * crack length
    double e_tot = 0.0;
};

struct EnergyOptions {
    int radial = 20;        // Gauss order per radial panel
    int angular = 96;
    double r_cap = 0.98;    // series-zone boundary
    double r_outer = 0.98;  // optional pointwise zone; beyond: ring sliver
    double boundary_offset = 1e-3;
    int work_nodes = 12;    // Gauss order per gamma_u half-arc
};

struct MapCache {
    std::mutex mutex;
    std::map<std::uint64_t, std::shared_ptr<const conf::ConformalDiskMap>> maps;
};

struct Scenario {
    geo::AnalyticalDomain domain;
    rh::MaterialParams material;
    fields::ModeIField base_load; // Dirichlet data on the interface
    LoadSchedule schedule;
    CandidateGrid grid;
    conf::SCOptions map_options;
    rh::SolverOptions solver_options;
    EnergyOptions energy_options;
    double map_tolerance = 1e-4;
    cplx normalization{std::numeric_limits<double>::quiet_NaN(), 0.0};
    int threads = 1;

    // maps are cached per crack path (the pre-computed-mapping idea)
    std::shared_ptr<MapCache> cache = std::make_shared<MapCache>();
    std::shared_ptr<const conf::ConformalDiskMap> map_for(
        const geo::CrackPath& path) const;
};

struct CandidateResult {
    double theta = 0.0;
    double d = 0.0;
    EnergyBreakdown energy;
    bool feasible = false;
    bool chosen = false;
    std::string error;
};

struct StepRecord {
    int step = 0;       // 1-based
    double load = 1.0;  // s_j
    double theta_star = 0.0;
    double d_star = 0.0;
    EnergyBreakdown chosen_energy;
    geo::CrackPath path_after;
    std::vector<CandidateResult> table;
};

struct PropagationHistory {
    std::vector<StepRecord> steps;
    bool complete = false;
    std::string abort_reason;
};

// G_c times the full crack length.
double dissipation(const geo::CrackPath& path, double g_c);

// Elastic energy stored in the mapped domain:
//   int int w(sigma) |omega'|^2 dA, w = (1/4mu)[s:s - ((3-kappa)/4)(tr s)^2].
// Within `tip_guard` of the tip prevertex angle the radial integration stops
// at r_cap: the reflection surrogate cannot be trusted against the 1/omega'
// amplification inside the tip cluster, and the true contribution there is
// of the order of the cluster measure.
double elastic_energy(const fields::FieldEvaluator& ev, const EnergyOptions& opts,
                      double tip_angle, double tip_guard = 0.0);

// Work of the interface tractions against the imposed displacement over
// gamma_u (the solution reproduces u* there up to solver tolerance).
double interface_work(const fields::FieldEvaluator& ev, const EnergyOptions& opts);

// One trial geometry at one load step; `base` is the incumbent crack
// (defaults to the scenario's own).
CandidateResult evaluate_candidate(const Scenario& sc, double load, double theta,
                                   double d,
                                   const geo::CrackPath* base = nullptr);

// Argmin over the candidate grid with deterministic tie-breaking:
// smallest d, then smallest |theta|, then theta >= 0.
StepRecord propagate_step(const Scenario& sc, int step_index,
                          const geo::CrackPath& current);

// Sequential quasi-static run over the whole load schedule.
PropagationHistory run(Scenario& sc);

// Table invariants used by tests and the verify command.
bool argmin_dominates(const StepRecord& rec);
bool scaled_argmin_never_longer(const StepRecord& rec, double factor);

} // namespace fracmap::energy

#endif

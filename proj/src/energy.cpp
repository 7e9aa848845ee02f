#include "fracmap/energy.hpp"

#include <atomic>
#include <future>
#include <sstream>

#include "fracmap/quadrature.hpp"

namespace fracmap::energy {

void LoadSchedule::validate() const
{
    if (multipliers.empty())
        throw config_error("load schedule needs at least one step");
    for (double s : multipliers)
        if (!std::isfinite(s)) throw config_error("load multiplier not finite");
}

void CandidateGrid::validate() const
{
    if (angles.empty() || lengths.empty())
        throw config_error("candidate grid must not be empty");
    bool has_zero_angle = false, has_zero_length = false;
    for (double a : angles) {
        if (a < -0.5 * pi - 1e-12 || a > 0.5 * pi + 1e-12)
            throw config_error("candidate angle outside [-pi/2, pi/2]");
        if (a == 0.0) has_zero_angle = true;
        bool mirrored = false;
        for (double b : angles)
            if (std::abs(a + b) < 1e-12) mirrored = true;
        if (!mirrored) throw config_error("candidate angle grid not symmetric");
    }
    for (double d : lengths) {
        if (d < 0.0) throw config_error("candidate length negative");
        if (d == 0.0) has_zero_length = true;
    }
    if (!has_zero_angle) throw config_error("candidate angle grid must contain 0");
    if (!has_zero_length)
        throw config_error("candidate length grid must contain 0 (no-growth)");
}

CandidateGrid CandidateGrid::defaults(double domain_size)
{
    CandidateGrid g;
    const int N = 18;
    for (int k = 0; k <= N; ++k)
        g.angles.push_back(-0.5 * pi + pi * k / N);
    g.angles[N / 2] = 0.0; // exact zero at the centre
    const double dmin = domain_size / 100.0;
    g.lengths = {0.0, dmin, 2.0 * dmin, 4.0 * dmin};
    return g;
}

double dissipation(const geo::CrackPath& path, double g_c)
{
    if (!(g_c > 0.0)) throw config_error("dissipation: G_c must be > 0");
    return g_c * path.length();
}

namespace {

double strain_density(const fields::FieldSample& s, const rh::MaterialParams& m)
{
    const double ss = s.s11 * s.s11 + s.s22 * s.s22 + 2.0 * s.s12 * s.s12;
    const double tr = s.s11 + s.s22;
    return (ss - (3.0 - m.kappa) / 4.0 * tr * tr) / (4.0 * m.mu);
}

} // namespace

double elastic_energy(const fields::FieldEvaluator& ev, const EnergyOptions& opts,
                      double tip_angle, double tip_guard)
{
    (void)tip_guard; // superseded by the series-radius cap
    const auto& mat = ev.solution().material();
    // integration stays inside the series-converged radius; the remaining
    // boundary sliver is approximated by its inner-ring value
    const double r_use = std::min(opts.r_cap, ev.solution().series_radius());

    // angular nodes, graded toward the tip prevertex: theta = tip + pi s^3
    // with Gauss nodes in s
    std::vector<std::pair<double, double>> ang;
    for (auto [s, w] : quad::gauss_legendre(opts.angular)) {
        const double th = tip_angle + pi * s * s * s;
        ang.emplace_back(th, w * 3.0 * pi * s * s);
    }

    auto ring_density = [&](double r, double th) {
        const cplx zeta = r * unit(th);
        const auto smp = ev.stresses_at(zeta);
        const cplx wp = ev.map_deriv(zeta);
        return strain_density(smp, mat) * std::norm(wp) * r;
    };

    double total = 0.0;
    const auto& rule = quad::gauss_legendre(opts.radial);
    // ring strictly inside the series radius: at the exact threshold the
    // evaluator could tip into the pointwise branch for some angles
    const double r_ring = r_use * (1.0 - 1e-9);
    // boundary sliver modelled with the density linear in r (the measure is
    // r dr), i.e. scaled by int_{r_use}^{1} r dr / r_ring
    const double sliver = 0.5 * (1.0 - r_use * r_use) / r_ring;
    for (auto [th, wth] : ang) {
        double radial = 0.0;
        for (auto [x, w] : rule)
            radial += w * 0.5 * r_use * ring_density(0.5 * r_use * (1.0 + x), th);
        radial += sliver * ring_density(r_ring, th);
        total += wth * radial;
    }
    if (total < 0.0 && total < -1e-10 * std::abs(total))
        throw numerical_error("elastic energy came out negative");
    return total;
}

double interface_work(const fields::FieldEvaluator& ev, const EnergyOptions& opts)
{
    // Tractions come from the exact one-sided limits of Omega on the circle
    // and the displacement is the imposed data, so the integral needs no
    // off-boundary field evaluations. sqrt-graded panels absorb the endpoint
    // behavior at the prevertices.
    const auto& sol = ev.solution();
    const auto& part = sol.partition();
    std::vector<double> cuts{part.theta_start};
    for (double b : part.u_breaks) cuts.push_back(b);
    cuts.push_back(part.theta_end);

    const auto& rule = quad::gauss_legendre(opts.work_nodes);
    auto integrand = [&](double th) {
        const cplx traction = sol.boundary_traction(th);
        const cplx u = sol.imposed_u(th);
        const double ds = std::abs(sol.map().deriv(unit(th)));
        return (std::conj(traction) * u).real() * ds;
    };
    double total = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        for (int half = 0; half < 2; ++half) {
            const double end = half == 0 ? cuts[i] : cuts[i + 1];
            const double sign = half == 0 ? 1.0 : -1.0;
            const double umax = std::sqrt(std::abs(mid - end));
            for (auto [x, w] : rule) {
                const double u = 0.5 * umax * (1.0 + x);
                const double th = end + sign * u * u;
                total += w * 0.5 * umax * 2.0 * u * integrand(th);
            }
        }
    }
    return total;
}

std::shared_ptr<const conf::ConformalDiskMap> Scenario::map_for(
    const geo::CrackPath& path) const
{
    const std::uint64_t key = path.hash();
    {
        std::lock_guard<std::mutex> lock(cache->mutex);
        auto it = cache->maps.find(key);
        if (it != cache->maps.end()) return it->second;
    }
    geo::AnalyticalDomain dom = domain;
    dom.crack = path;
    auto built = std::make_shared<conf::ConformalDiskMap>(
        conf::build_map_for_domain(dom, normalization, map_tolerance, map_options));
    std::lock_guard<std::mutex> lock(cache->mutex);
    cache->maps.emplace(key, built);
    return built;
}

CandidateResult evaluate_candidate(const Scenario& sc, double load, double theta,
                                   double d, const geo::CrackPath* base)
{
    CandidateResult res;
    res.theta = theta;
    res.d = d;
    try {
        geo::AnalyticalDomain dom = sc.domain;
        if (base) dom.crack = *base;
        if (d > 0.0) dom.crack = geo::extend_crack(dom.crack, theta, d, &dom);
        auto map = sc.map_for(dom.crack);
        const auto poly = geo::widen_slit(dom);
        auto part = rh::BoundaryPartition::from_slit_map(*map, poly.slit_vertex_count);

        auto data = sc.base_load.boundary_data(map);
        data.load_scale = load;
        auto sol = rh::solve(map, part, sc.material, data, sc.solver_options);
        fields::FieldEvaluator ev(sol);

        // grade the energy grid about the middle of the tip face: the
        // mid-angle is mirror-covariant, a single corner is not
        const int ti = std::max(0, poly.tip_index);
        const auto& pre_angles = map->prevertex_angles();
        const double tip_angle =
            0.5 * (pre_angles[ti] + pre_angles[(ti + 1) % pre_angles.size()]);
        res.energy.e_a = (load == 0.0)
                             ? 0.0
                             : elastic_energy(ev, sc.energy_options, tip_angle);
        res.energy.w_a =
            (load == 0.0) ? 0.0 : interface_work(ev, sc.energy_options);
        res.energy.d = dissipation(dom.crack, sc.material.g_c);
        res.energy.e_tot = res.energy.e_a - res.energy.w_a + res.energy.d;
        res.feasible = true;
    } catch (const std::exception& e) {
        res.feasible = false;
        res.error = e.what();
    }
    return res;
}

StepRecord propagate_step(const Scenario& sc, int step_index,
                          const geo::CrackPath& current)
{
    sc.grid.validate();
    StepRecord rec;
    rec.step = step_index + 1;
    rec.load = sc.schedule.multipliers.at(step_index);

    // no-growth candidate evaluated once and replicated over the angle grid
    const CandidateResult incumbent =
        evaluate_candidate(sc, rec.load, 0.0, 0.0, &current);

    std::vector<std::pair<double, double>> jobs;
    for (double th : sc.grid.angles)
        for (double d : sc.grid.lengths)
            if (d > 0.0) jobs.emplace_back(th, d);

    std::vector<CandidateResult> grown(jobs.size());
    if (sc.threads > 1) {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                grown[i] = evaluate_candidate(sc, rec.load, jobs[i].first,
                                              jobs[i].second, &current);
            }
        };
        std::vector<std::future<void>> pool;
        for (int t = 0; t < sc.threads; ++t)
            pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    } else {
        for (size_t i = 0; i < jobs.size(); ++i)
            grown[i] = evaluate_candidate(sc, rec.load, jobs[i].first,
                                          jobs[i].second, &current);
    }

    // assemble the full table in grid order (ordered reduction)
    size_t gi = 0;
    for (double th : sc.grid.angles) {
        for (double d : sc.grid.lengths) {
            if (d > 0.0) {
                rec.table.push_back(grown[gi++]);
            } else {
                CandidateResult r0 = incumbent;
                r0.theta = th;
                rec.table.push_back(r0);
            }
        }
    }

    // argmin with the deterministic tie-break
    int best = -1;
    auto better = [&](const CandidateResult& a, const CandidateResult& b) {
        if (a.energy.e_tot != b.energy.e_tot)
            return a.energy.e_tot < b.energy.e_tot;
        if (a.d != b.d) return a.d < b.d;
        if (std::abs(a.theta) != std::abs(b.theta))
            return std::abs(a.theta) < std::abs(b.theta);
        return a.theta > b.theta;
    };
    for (size_t i = 0; i < rec.table.size(); ++i) {
        if (!rec.table[i].feasible) continue;
        if (best < 0 || better(rec.table[i], rec.table[best]))
            best = static_cast<int>(i);
    }
    if (best < 0) throw numerical_error("all propagation candidates infeasible");
    rec.table[best].chosen = true;
    rec.theta_star = rec.table[best].theta;
    rec.d_star = rec.table[best].d;
    rec.chosen_energy = rec.table[best].energy;
    rec.path_after = (rec.d_star > 0.0)
                         ? geo::extend_crack(current, rec.theta_star, rec.d_star)
                         : current;
    return rec;
}

PropagationHistory run(Scenario& sc)
{
    sc.schedule.validate();
    sc.grid.validate();
    sc.material.validate(true);
    PropagationHistory hist;
    geo::CrackPath current = sc.domain.crack;
    for (size_t j = 0; j < sc.schedule.multipliers.size(); ++j) {
        try {
            StepRecord rec = propagate_step(sc, static_cast<int>(j), current);
            current = rec.path_after;
            hist.steps.push_back(std::move(rec));
        } catch (const std::exception& e) {
            hist.abort_reason = e.what();
            hist.complete = false;
            return hist;
        }
    }
    hist.complete = true;
    return hist;
}

bool argmin_dominates(const StepRecord& rec)
{
    double chosen = 0.0;
    for (const auto& c : rec.table)
        if (c.chosen) chosen = c.energy.e_tot;
    for (const auto& c : rec.table)
        if (c.feasible && c.energy.e_tot < chosen - 1e-12 * std::abs(chosen))
            return false;
    return true;
}

bool scaled_argmin_never_longer(const StepRecord& rec, double factor)
{
    // With fixed interface displacements, W_A = 2 E_A (Clapeyron), so
    // c^2 (E_A - W_A) + D = D - c^2 E_A: raising the load multiplier can only
    // move the argmin toward shorter extensions. Assert that over the table.
    auto argmin_d = [&](double c2) {
        double best = std::numeric_limits<double>::max();
        double bestd = 0.0, bestth = 0.0;
        bool first = true;
        for (const auto& cand : rec.table) {
            if (!cand.feasible) continue;
            const double e = c2 * (cand.energy.e_a - cand.energy.w_a) +
                             cand.energy.d;
            const bool tie = std::abs(e - best) <= 1e-14 * std::max(1.0, std::abs(best));
            if (first || (e < best && !tie) ||
                (tie && (cand.d < bestd ||
                         (cand.d == bestd && std::abs(cand.theta) < std::abs(bestth))))) {
                best = std::min(e, best);
                bestd = cand.d;
                bestth = cand.theta;
                first = false;
            }
        }
        return bestd;
    };
    return argmin_d(factor * factor) <= argmin_d(1.0) + 1e-15;
}

} // namespace fracmap::energy

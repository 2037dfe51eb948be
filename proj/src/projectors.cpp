#include "pathdep/projectors.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "pathdep/parallel.hpp"
#include "pathdep/rng.hpp"
#include "pathdep/stats.hpp"

namespace pathdep {

namespace {

void probe_measurability(const PathRandomVariable& z, const CadlagPath& sample) {
    if (!z.measurability_time) return;
    const double u = *z.measurability_time;
    const double zu = z.z(sample.stopped(u).view());
    const double zfull = z.z(sample.view());
    if (zu != zfull)
        throw std::domain_error("PathRandomVariable '" + z.name +
                                "' is not measurable at its declared time");
}

} // namespace

ProjectorEstimate estimate_projector(const Model& model, const InitialCondition& init,
                                     const PathRandomVariable& z, std::size_t n_paths,
                                     std::uint64_t seed, int workers) {
    if (n_paths < 2)
        throw std::invalid_argument("estimate_projector: n_paths must be >= 2");
    const int m = model.coeffs.dim;
    std::vector<MeanVar> parts((n_paths + kSimBlock - 1) / kSimBlock);
    simulate_visit(model, init, n_paths, seed, workers, 0,
                   [&](std::size_t i, const double* values) {
                       const PathView pv(*model.grid, values, m);
                       const double v = z.z(pv);
                       if (std::abs(v) > z.bound + 1e-9)
                           throw std::domain_error("PathRandomVariable '" + z.name +
                                                   "' exceeded its declared bound");
                       if (i == 0)
                           probe_measurability(
                               z, CadlagPath(model.grid, m,
                                             std::vector<double>(values,
                                                                 values + model.grid->size() * m)));
                       parts[i / kSimBlock].add(v);
                   });
    MeanVar acc;
    for (const auto& p : parts) acc.merge(p);
    return ProjectorEstimate{acc.mean, acc.stderr_mean(), acc.n};
}

NestedReport verify_projector_composition(const Model& model,
                                          const InitialCondition& init,
                                          const PathRandomVariable& z, double t,
                                          std::size_t n_outer, std::size_t n_inner,
                                          std::uint64_t seed, double z_crit,
                                          int workers) {
    if (t < init.s)
        throw std::invalid_argument("verify_projector_composition: t must be >= s");
    if (n_outer < 2 || n_inner < 2)
        throw std::invalid_argument("verify_projector_composition: budgets must be >= 2");
    const int m = model.coeffs.dim;

    const PathEnsemble outer =
        simulate(model, init, n_outer, derive_seed(seed, seed_tag::simulate, 0), workers);

    std::vector<double> nested_vals(n_outer), direct_vals(n_outer);
    parallel_chunks(n_outer, 4, workers, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const std::uint64_t seed_i = derive_seed(seed, seed_tag::inner, i);
            // inner estimate restarted from the stopped outer path
            const InitialCondition restart = InitialCondition::make(t, outer.extract(i));
            MeanVar inner;
            simulate_visit(model, restart, n_inner, seed_i, 1, 0,
                           [&](std::size_t, const double* values) {
                               inner.add(z.z(PathView(*model.grid, values, m)));
                           });
            nested_vals[i] = inner.mean;
            // direct estimate of P_s[z] from the same seed
            MeanVar direct;
            simulate_visit(model, init, n_inner, seed_i, 1, 0,
                           [&](std::size_t, const double* values) {
                               direct.add(z.z(PathView(*model.grid, values, m)));
                           });
            direct_vals[i] = direct.mean;
        }
    });

    MeanVar nested, direct;
    for (std::size_t i = 0; i < n_outer; ++i) {
        nested.add(nested_vals[i]);
        direct.add(direct_vals[i]);
    }
    NestedReport rep;
    rep.n_outer = n_outer;
    rep.n_inner = n_inner;
    rep.nested = nested.mean;
    rep.nested_se = nested.stderr_mean();
    rep.direct = direct.mean;
    rep.direct_se = direct.stderr_mean();
    rep.discrepancy = rep.nested - rep.direct;
    rep.combined_se = std::sqrt(rep.nested_se * rep.nested_se + rep.direct_se * rep.direct_se);
    rep.z = z_score(rep.discrepancy, 0.0, rep.combined_se);
    rep.pass = std::abs(rep.z) <= z_crit;
    return rep;
}

FlowReport verify_flow_property(const Model& model, const InitialCondition& init,
                                double t, const std::vector<EventSpec>& events_f,
                                const std::vector<EventSpec>& events_g,
                                std::size_t n_outer, std::size_t n_inner,
                                std::uint64_t seed, double z_crit, int workers) {
    if (events_f.empty() || events_g.empty())
        throw std::invalid_argument("verify_flow_property: empty event bank");
    if (t < init.s)
        throw std::invalid_argument("verify_flow_property: t must be >= s");
    for (const auto& g : events_g)
        if (g.kind != "all" && g.latest_time() > t + 1e-12)
            throw std::invalid_argument("verify_flow_property: conditioning event '" +
                                        g.label + "' depends on the post-t path");
    const int m = model.coeffs.dim;
    const std::size_t nf = events_f.size(), ng = events_g.size();

    const PathEnsemble outer =
        simulate(model, init, n_outer, derive_seed(seed, seed_tag::simulate, 0), workers);

    // per outer path: indicator of each F, each G, and inner estimate of each F
    std::vector<double> ind_f(n_outer * nf), ind_g(n_outer * ng), inner_p(n_outer * nf);
    parallel_chunks(n_outer, 4, workers, [&](std::size_t, std::size_t b, std::size_t e) {
        std::vector<MeanVar> inner(nf);
        for (std::size_t i = b; i < e; ++i) {
            const PathView pv = outer.path(i);
            for (std::size_t fi = 0; fi < nf; ++fi)
                ind_f[i * nf + fi] = events_f[fi].contains(pv) ? 1.0 : 0.0;
            for (std::size_t gi = 0; gi < ng; ++gi)
                ind_g[i * ng + gi] = events_g[gi].contains(pv) ? 1.0 : 0.0;
            const InitialCondition restart = InitialCondition::make(t, outer.extract(i));
            for (auto& mv : inner) mv = MeanVar{};
            simulate_visit(model, restart, n_inner,
                           derive_seed(seed, seed_tag::inner, i), 1, 0,
                           [&](std::size_t, const double* values) {
                               const PathView ip(*model.grid, values, m);
                               for (std::size_t fi = 0; fi < nf; ++fi)
                                   inner[fi].add(events_f[fi].contains(ip) ? 1.0 : 0.0);
                           });
            for (std::size_t fi = 0; fi < nf; ++fi) inner_p[i * nf + fi] = inner[fi].mean;
        }
    });

    FlowReport rep;
    rep.n_outer = n_outer;
    rep.n_inner = n_inner;
    for (std::size_t fi = 0; fi < nf; ++fi)
        for (std::size_t gi = 0; gi < ng; ++gi) {
            MeanVar lhs, rhs, paired;
            for (std::size_t i = 0; i < n_outer; ++i) {
                const double g = ind_g[i * ng + gi];
                lhs.add(g * ind_f[i * nf + fi]);
                rhs.add(g * inner_p[i * nf + fi]);
                paired.add(g * (ind_f[i * nf + fi] - inner_p[i * nf + fi]));
            }
            FlowRow row;
            row.event_f = events_f[fi].label;
            row.event_g = events_g[gi].label;
            row.lhs = lhs.mean;
            row.lhs_se = lhs.stderr_mean();
            row.rhs = rhs.mean;
            row.rhs_se = rhs.stderr_mean();
            row.discrepancy = paired.mean;
            row.combined_se = paired.stderr_mean();
            row.z = z_score(row.discrepancy, 0.0, row.combined_se);
            row.pass = std::abs(row.z) <= z_crit;
            rep.pass = rep.pass && row.pass;
            rep.rows.push_back(std::move(row));
        }
    return rep;
}

PinningReport verify_pinning(const Model& model, const InitialCondition& init,
                             std::size_t n_paths, std::uint64_t seed, int workers) {
    const int m = model.coeffs.dim;
    const std::size_t ks = model.grid->node_of(init.s);
    const double* eta = init.eta.values().data();
    std::vector<std::size_t> bad((n_paths + kSimBlock - 1) / kSimBlock, 0);
    simulate_visit(model, init, n_paths, seed, workers, 0,
                   [&](std::size_t i, const double* values) {
                       if (std::memcmp(values, eta, (ks + 1) * m * sizeof(double)) != 0)
                           ++bad[i / kSimBlock];
                   });
    PinningReport rep;
    rep.n_paths = n_paths;
    for (std::size_t b : bad) rep.mismatched += b;
    rep.pass = rep.mismatched == 0;
    return rep;
}

TrivialityReport verify_start_triviality(const Model& model,
                                         const InitialCondition& init,
                                         const std::vector<EventSpec>& events_before_s,
                                         std::size_t n_paths, std::uint64_t seed,
                                         int workers) {
    const int m = model.coeffs.dim;
    const std::size_t ne = events_before_s.size();
    for (const auto& ev : events_before_s)
        if (ev.kind != "all" && ev.latest_time() > init.s + 1e-12)
            throw std::invalid_argument("verify_start_triviality: event '" + ev.label +
                                        "' looks past the start time");
    std::vector<std::size_t> counts((n_paths + kSimBlock - 1) / kSimBlock * ne, 0);
    simulate_visit(model, init, n_paths, seed, workers, 0,
                   [&](std::size_t i, const double* values) {
                       const PathView pv(*model.grid, values, m);
                       for (std::size_t eidx = 0; eidx < ne; ++eidx)
                           if (events_before_s[eidx].contains(pv))
                               ++counts[(i / kSimBlock) * ne + eidx];
                   });
    TrivialityReport rep;
    for (std::size_t eidx = 0; eidx < ne; ++eidx) {
        std::size_t total = 0;
        for (std::size_t c = 0; c * ne + eidx < counts.size(); ++c)
            total += counts[c * ne + eidx];
        TrivialityRow row;
        row.event = events_before_s[eidx].label;
        row.frequency = static_cast<double>(total) / static_cast<double>(n_paths);
        row.pass = (total == 0) || (total == n_paths);
        rep.pass = rep.pass && row.pass;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

} // namespace pathdep

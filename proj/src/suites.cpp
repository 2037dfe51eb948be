#include "pathdep/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pathdep/maf.hpp"
#include "pathdep/parallel.hpp"
#include "pathdep/report.hpp"
#include "pathdep/rng.hpp"
#include "pathdep/stats.hpp"

namespace pathdep {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// F-events for flow/composition checks: balls at the horizon around the
// lattice, deterministic in the seed
std::vector<EventSpec> terminal_event_bank(const TimeGrid& grid, int dim,
                                           std::size_t count, std::uint64_t seed,
                                           double center_scale) {
    auto bank = make_event_bank(grid, dim, grid.horizon(), count, seed, center_scale);
    for (auto& ev : bank) {
        ev.times.resize(1);
        ev.centers.resize(1);
        ev.radii.resize(1);
        ev.times[0] = grid.horizon();
        std::ostringstream label;
        label << "ball[t=" << ev.times[0] << ",c=(";
        for (int d = 0; d < dim; ++d) {
            if (d) label << ",";
            label << ev.centers[0][d];
        }
        label << "),r=" << ev.radii[0] << "]";
        ev.label = label.str();
    }
    return bank;
}

std::vector<std::pair<double, double>> time_pairs(const ExperimentConfig& cfg, double s) {
    std::vector<double> ts;
    for (double t : cfg.times)
        if (t >= s - 1e-12) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = i + 1; j < ts.size(); ++j)
            pairs.emplace_back(ts[i], ts[j]);
    return pairs;
}

double first_time_after(const ExperimentConfig& cfg, double s) {
    for (double t : cfg.times)
        if (t > s + 1e-12 && t < cfg.horizon - 1e-12) return t;
    return (s + cfg.horizon) / 2.0;
}

json cell_json(const std::string& id, double estimate, double stderr_, double z,
               bool pass) {
    return json{{"test_id", id}, {"estimate", estimate}, {"stderr", stderr_},
                {"z", z},        {"pass", pass}};
}

SuiteResult suite_canonical(const ExperimentConfig& cfg, int workers) {
    SuiteResult res;
    res.name = "canonical";
    const Model model = build_model(cfg);
    const InitialCondition init = build_initial(cfg, model.grid);
    json checks = json::object();
    bool pass = true;

    const auto pin = verify_pinning(model, init, cfg.n_paths, cfg.seed, workers);
    checks["pinning"] = to_json(pin);
    pass = pass && pin.pass;

    const auto bank_s = make_event_bank(*model.grid, cfg.state_dim, init.s,
                                        cfg.event_bank_size, cfg.seed,
                                        /*center_scale=*/0.5);
    const auto triv = verify_start_triviality(model, init, bank_s,
                                              std::min<std::size_t>(cfg.n_paths, 4096),
                                              cfg.seed, workers);
    checks["start_triviality"] = to_json(triv);
    pass = pass && triv.pass;

    // restriction of P_s to variables measurable before s is the identity
    {
        PathRandomVariable zs;
        zs.name = "tanh(X_s)";
        zs.bound = 1.0;
        const double s = init.s;
        zs.z = [s](const PathView& p) { return std::tanh(p.at(s, 0)); };
        zs.measurability_time = s;
        const auto est = estimate_projector(model, init, zs,
                                            std::min<std::size_t>(cfg.n_paths, 4096),
                                            cfg.seed, workers);
        const double want = std::tanh(init.eta.evaluate(s, 0));
        const bool ok = est.stderr_ == 0.0 && est.value == want;
        checks["identity_before_s"] = cell_json("canonical/identity", est.value,
                                                est.stderr_, 0.0, ok);
        pass = pass && ok;
    }

    const double t = first_time_after(cfg, init.s);
    {
        PathRandomVariable zT;
        zT.name = "cos(X_T)";
        zT.bound = 1.0;
        const double T = cfg.horizon;
        zT.z = [T](const PathView& p) { return std::cos(p.at(T, 0)); };
        const auto comp = verify_projector_composition(model, init, zT, t, cfg.n_outer,
                                                       cfg.n_inner, cfg.seed,
                                                       cfg.z_crit, workers);
        checks["composition"] = to_json(comp);
        pass = pass && comp.pass;
    }
    {
        const auto events_f = terminal_event_bank(*model.grid, cfg.state_dim, 2,
                                                  derive_seed(cfg.seed, 11, 0), 0.5);
        auto events_g = make_event_bank(*model.grid, cfg.state_dim, t, 2,
                                        derive_seed(cfg.seed, 12, 0), 0.5);
        events_g.insert(events_g.begin(), EventSpec::whole_space());
        const auto flow = verify_flow_property(model, init, t, events_f, events_g,
                                               cfg.n_outer, cfg.n_inner, cfg.seed,
                                               cfg.z_crit, workers);
        checks["flow"] = to_json(flow);
        pass = pass && flow.pass;
    }

    res.report = json{{"suite", "canonical"}, {"checks", checks}, {"pass", pass}};
    res.pass = pass;
    return res;
}

SuiteResult suite_mp(const ExperimentConfig& cfg, int workers) {
    SuiteResult res;
    res.name = "mp";
    const Model model = build_model(cfg);
    const InitialCondition init = build_initial(cfg, model.grid);
    const PathEnsemble ens = simulate(model, init, cfg.n_paths, cfg.seed, workers);

    MartingaleProblemSpec spec;
    spec.functions = trig_family(cfg.theta_set);
    spec.time_pairs = time_pairs(cfg, init.s);
    if (spec.time_pairs.empty())
        throw ConfigError("mp suite: verify.times yields no (t,u) pairs after start_time");
    spec.events_per_t = cfg.event_bank_size;
    spec.event_seed = cfg.seed;
    spec.z_crit = cfg.z_crit;
    spec.sabotage_generator = cfg.sabotage_generator;
    const auto rep = verify_martingale_problem(ens, model, spec, workers);
    res.report = to_json(rep);
    res.report["suite"] = "mp";
    res.pass = rep.pass;
    return res;
}

SuiteResult suite_generator(const ExperimentConfig& cfg, int workers) {
    SuiteResult res;
    res.name = "generator";
    const Model model = build_model(cfg);
    const InitialCondition init = build_initial(cfg, model.grid);
    const auto family = trig_family({cfg.theta_set.front()});
    json cells = json::array();
    bool pass = true;
    std::size_t idx = 0;
    for (const auto& f : family) {
        const ProcessFunctional phi = cylinder_functional(model, f);
        for (double t : cfg.times) {
            if (t < init.s - 1e-12) continue;
            const auto rep = verify_weak_generator(model, phi, init, t, cfg.n_paths,
                                                   derive_seed(cfg.seed, 21, idx++),
                                                   cfg.z_crit, workers);
            json c = to_json(rep);
            c["f"] = f.name;
            c["test_id"] = "generator/" + f.name + "/t=" + fmt(t);
            cells.push_back(c);
            pass = pass && rep.pass;
        }
    }
    res.report = json{{"suite", "generator"}, {"cells", cells}, {"pass", pass}};
    res.pass = pass;
    return res;
}

SuiteResult suite_maf(const ExperimentConfig& cfg, int workers) {
    SuiteResult res;
    res.name = "maf";
    const Model model = build_model(cfg);
    const InitialCondition init = build_initial(cfg, model.grid);
    const TimeGrid& grid = *model.grid;
    const double s = init.s, T = cfg.horizon;
    json cells = json::array();
    bool pass = true;

    const auto family = trig_family({cfg.theta_set.front()});
    const TestFunction& f = family.front();
    const ProcessFunctional phi = cylinder_functional(model, f);
    const AdditiveFunctional m = maf_functional(phi);
    const auto scheme = PartitionScheme::dyadic(grid, s, T, cfg.qv_levels);
    const std::size_t n_levels = scheme.levels.size();

    // ensemble means of the per-level QV sums, of the compensator quadrature
    // and of the M^2-minus-bracket defect
    const PathEnsemble ens = simulate(model, init, cfg.n_paths, cfg.seed, workers);
    std::vector<MeanVar> qv_levels(n_levels);
    MeanVar bracket_acc, defect_acc;
    {
        struct Acc {
            std::vector<MeanVar> qv;
            MeanVar bracket, defect;
        };
        auto total = chunked_reduce(
            ens.n_paths, 64, workers, Acc{std::vector<MeanVar>(n_levels), {}, {}},
            [&](std::size_t, std::size_t b, std::size_t e, Acc& a) {
                for (std::size_t i = b; i < e; ++i) {
                    const PathView pv = ens.path(i);
                    const auto levels = quadratic_variation(m, scheme, pv);
                    for (std::size_t l = 0; l < n_levels; ++l) a.qv[l].add(levels[l]);
                    const double br = angular_bracket_cylinder(model, f, s, T, pv);
                    a.bracket.add(br);
                    const double inc = m.increment(s, T, pv);
                    a.defect.add(inc * inc - br);
                }
            },
            [](Acc& tot, const Acc& part) {
                for (std::size_t l = 0; l < tot.qv.size(); ++l) tot.qv[l].merge(part.qv[l]);
                tot.bracket.merge(part.bracket);
                tot.defect.merge(part.defect);
            });
        qv_levels = std::move(total.qv);
        bracket_acc = total.bracket;
        defect_acc = total.defect;
    }
    {
        const double diff = qv_levels.back().mean - bracket_acc.mean;
        const double se = std::sqrt(std::pow(qv_levels.back().stderr_mean(), 2) +
                                    std::pow(bracket_acc.stderr_mean(), 2));
        const double z = z_score(diff, 0.0, se);
        const bool ok = std::abs(z) <= cfg.z_crit;
        cells.push_back(cell_json("maf/qv_vs_compensator", diff, se, z, ok));
        pass = pass && ok;
    }
    {
        const double z = z_score(defect_acc.mean, 0.0, defect_acc.stderr_mean());
        const bool ok = std::abs(z) <= cfg.z_crit;
        cells.push_back(
            cell_json("maf/bracket_martingality", defect_acc.mean,
                      defect_acc.stderr_mean(), z, ok));
        pass = pass && ok;
    }

    // QV of a deterministic bounded-variation functional decays linearly
    {
        AdditiveFunctional lin{"u-t", [](double t, double u, const PathView&) {
                                   return u - t;
                               }};
        const auto lv = quadratic_variation(lin, scheme, ens.path(0));
        bool ok = true;
        for (std::size_t l = 0; l + 1 < lv.size(); ++l) {
            const double ratio = lv[l] > 0.0 ? lv[l + 1] / lv[l] : 0.0;
            ok = ok && ratio >= 0.4 && ratio <= 0.6;
        }
        cells.push_back(cell_json("maf/qv_bv_decay", lv.back(), 0.0, 0.0, ok));
        pass = pass && ok;
    }

    // bracket process of the cylinder MAF along the first sampled path
    std::string bracket_csv = "t,value\n";
    for (std::size_t k = grid.node_of(s); k < grid.size(); ++k) {
        const double tk = grid.time(k);
        const double br =
            tk > s ? angular_bracket_cylinder(model, f, s, tk, ens.path(0)) : 0.0;
        bracket_csv += fmt(tk) + "," + fmt(br) + "\n";
    }

    // density recovery: A = int r dr against h_t = t, and the constant case
    std::string density_csv = "t,value\n";
    {
        const std::size_t window = std::max<std::size_t>(1, cfg.density_windows.front());
        const double delta = window * grid.mesh();
        AdditiveFunctional a_quad{"int r dr", [](double t, double u, const PathView&) {
                                      return 0.5 * (u * u - t * t);
                                  }};
        const auto dens = rn_density(a_quad, [](double t) { return t; },
                                     ens.path(0), window);
        double max_err = 0.0;
        for (std::size_t k = 0; k < dens.times.size(); ++k) {
            max_err = std::max(max_err, std::abs(dens.h[k] - dens.times[k]));
            density_csv += fmt(dens.times[k]) + "," + fmt(dens.h[k]) + "\n";
        }
        const bool ok = max_err <= delta;
        cells.push_back(cell_json("maf/rn_density_linear", max_err, 0.0, 0.0, ok));
        pass = pass && ok;

        AdditiveFunctional a_id{"u-t", [](double t, double u, const PathView&) {
                                    return u - t;
                                }};
        const auto dens1 = rn_density(a_id, [](double t) { return t; }, ens.path(0), window);
        double err1 = 0.0;
        for (double h : dens1.h) err1 = std::max(err1, std::abs(h - 1.0));
        cells.push_back(cell_json("maf/rn_density_constant", err1, 0.0, 0.0, err1 == 0.0));
        pass = pass && (err1 == 0.0);
    }

    // Jordan split of the sampled cylinder increments
    {
        AdditiveFunctional af{"f(X)", [&f](double t, double u, const PathView& p) {
                                  return f.f(p.at(u)) - f.f(p.at(t));
                              }};
        const auto [p_var, n_var] = variation_split(af, ens.path(0), s, T);
        const double total = af.increment(s, T, ens.path(0));
        const bool ok = std::abs((p_var - n_var) - total) <= 1e-9;
        cells.push_back(cell_json("maf/variation_split", p_var - n_var, 0.0, 0.0, ok));
        pass = pass && ok;
    }

    std::string qv_csv = "level,mesh,value\n";
    for (std::size_t l = 0; l < n_levels; ++l) {
        double mesh_l = 0.0;
        const auto& nodes = scheme.levels[l];
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
            mesh_l = std::max(mesh_l, nodes[i + 1] - nodes[i]);
        qv_csv += std::to_string(l) + "," + fmt(mesh_l) + "," + fmt(qv_levels[l].mean) + "\n";
    }

    json qv_rows = json::array();
    for (std::size_t l = 0; l < n_levels; ++l) {
        double mesh_l = 0.0;
        const auto& nodes = scheme.levels[l];
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
            mesh_l = std::max(mesh_l, nodes[i + 1] - nodes[i]);
        qv_rows.push_back(json{{"level", l},
                               {"mesh", mesh_l},
                               {"value", qv_levels[l].mean},
                               {"stderr", qv_levels[l].stderr_mean()}});
    }
    res.report = json{{"suite", "maf"},
                      {"cells", cells},
                      {"qv_convergence", qv_rows},
                      {"pass", pass}};
    res.csv_files.emplace_back("qv_convergence.csv", qv_csv);
    res.csv_files.emplace_back("density.csv", density_csv);
    res.csv_files.emplace_back("bracket.csv", bracket_csv);
    res.pass = pass;
    return res;
}

SuiteResult suite_tightness(const ExperimentConfig& cfg, int workers) {
    SuiteResult res;
    res.name = "tightness";
    const Model model = build_model(cfg);
    const ConvergenceScenario scenario =
        cfg.scenario_file.empty()
            ? default_scenario(cfg, model.grid, 5)
            : load_scenario(cfg.scenario_file, model.grid, cfg.horizon);
    TightnessOptions opt;
    opt.epsilon = cfg.tightness.epsilon;
    opt.alphas = cfg.tightness.alphas;
    opt.k_start = cfg.tightness.k_start;
    opt.k_cap = cfg.tightness.k_cap;
    opt.theta_start = cfg.tightness.theta_start;
    opt.workers = workers;
    const auto verdict = run_tightness_diagnostic(model, scenario, cfg.n_paths,
                                                  cfg.tightness.window, opt, cfg.seed);
    res.report = to_json(verdict);
    res.report["suite"] = "tightness";
    res.pass = verdict.pass;
    return res;
}

SuiteResult suite_continuity(const ExperimentConfig& cfg, int workers) {
    SuiteResult res;
    res.name = "continuity";
    const Model model = build_model(cfg);
    const ConvergenceScenario scenario =
        cfg.scenario_file.empty()
            ? default_scenario(cfg, model.grid, 6)
            : load_scenario(cfg.scenario_file, model.grid, cfg.horizon);
    const auto rep = run_convergence_diagnostic(model, scenario, cfg.n_paths, cfg.seed,
                                                cfg.tolerance, workers);
    res.report = to_json(rep);
    res.report["suite"] = "continuity";
    std::string csv = "level,g,start_distance,estimate,stderr\n";
    for (const auto& row : rep.rows)
        csv += std::to_string(row.level) + "," + row.g + "," + fmt(row.start_distance) +
               "," + fmt(row.diff) + "," + fmt(row.paired_se) + "\n";
    res.csv_files.emplace_back("convergence_diagnostic.csv", csv);
    res.pass = rep.pass;
    return res;
}

} // namespace

SuiteResult run_suite(const ExperimentConfig& cfg, const std::string& suite,
                      int workers) {
    if (suite == "canonical") return suite_canonical(cfg, workers);
    if (suite == "mp") return suite_mp(cfg, workers);
    if (suite == "generator") return suite_generator(cfg, workers);
    if (suite == "maf") return suite_maf(cfg, workers);
    if (suite == "tightness") return suite_tightness(cfg, workers);
    if (suite == "continuity") return suite_continuity(cfg, workers);
    throw ConfigError("unknown suite '" + suite +
                      "' (expected canonical|mp|generator|maf|tightness|continuity)");
}

json dump_event_banks(const ExperimentConfig& cfg) {
    const Model model = build_model(cfg);
    const InitialCondition init = build_initial(cfg, model.grid);
    json banks = json::object();
    std::vector<double> ts;
    for (double t : cfg.times)
        if (t >= init.s - 1e-12) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    std::size_t q = 0;
    for (double t : ts) {
        const auto bank = make_event_bank(*model.grid, cfg.state_dim, t,
                                          cfg.event_bank_size,
                                          derive_seed(cfg.seed, seed_tag::scenario, q++),
                                          0.5);
        json rows = json::array();
        for (const auto& ev : bank) {
            rows.push_back(json{{"label", ev.label},
                                {"times", ev.times},
                                {"centers", ev.centers},
                                {"radii", ev.radii}});
        }
        banks[fmt(t)] = rows;
    }
    return banks;
}

int cmd_simulate(const ExperimentConfig& cfg, int workers) {
    const auto t0 = std::chrono::steady_clock::now();
    const Model model = build_model(cfg);
    const InitialCondition init = build_initial(cfg, model.grid);
    const PathEnsemble ens = simulate(model, init, cfg.n_paths, cfg.seed, workers);

    const fs::path dir = fs::path(cfg.out_dir) / "paths";
    fs::create_directories(dir);
    std::string file_hashes;
    for (std::size_t i = 0; i < ens.n_paths; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "path_%06zu.csv", i);
        const fs::path file = dir / name;
        write_path_csv(ens.extract(i), file.string());
        file_hashes += sha256_hex(read_text_file(file.string()));
    }

    const auto probe = validate_coefficients(model.coeffs, model.jumps, model.grid,
                                             16, cfg.seed);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    json manifest{{"schema_version", kSchemaVersion},
                  {"tool_version", kToolVersion},
                  {"config_hash", config_hash(cfg)},
                  {"seed", cfg.seed},
                  {"n_paths", cfg.n_paths},
                  {"grid", {{"horizon", cfg.horizon}, {"mesh", cfg.mesh},
                            {"nodes", model.grid->size()}}},
                  {"output_hash", sha256_hex(file_hashes)},
                  {"coefficient_probe", to_json(probe)},
                  {"timings_ms", {{"simulate", ms}}}};
    write_text_file((fs::path(cfg.out_dir) / "ensemble_manifest.json").string(),
                    manifest.dump(2) + "\n");
    return 0;
}

int cmd_verify(const ExperimentConfig& cfg, const std::string& suite, int workers,
               bool dump_events) {
    const auto t0 = std::chrono::steady_clock::now();
    const SuiteResult res = run_suite(cfg, suite, workers);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

    const fs::path out(cfg.out_dir);
    write_text_file((out / (suite + "_report.json")).string(), res.report.dump(2) + "\n");
    const bool want_csv =
        std::find(cfg.formats.begin(), cfg.formats.end(), "csv") != cfg.formats.end();
    if (want_csv)
        for (const auto& [name, content] : res.csv_files)
            write_text_file((out / name).string(), content);
    if (dump_events)
        write_text_file((out / "event_bank.json").string(),
                        dump_event_banks(cfg).dump(2) + "\n");

    // merge into the run manifest (timings live here, not in reports)
    json manifest;
    const fs::path mpath = out / "run_manifest.json";
    if (fs::exists(mpath)) {
        try {
            manifest = json::parse(read_text_file(mpath.string()));
        } catch (const json::exception&) {
            manifest = json::object();
        }
    }
    manifest["schema_version"] = kSchemaVersion;
    manifest["tool_version"] = kToolVersion;
    manifest["config_hash"] = config_hash(cfg);
    manifest["seed"] = cfg.seed;
    if (!manifest.contains("suites")) manifest["suites"] = json::object();
    manifest["suites"][suite] = json{{"pass", res.pass}};
    if (!manifest.contains("timings_ms")) manifest["timings_ms"] = json::object();
    manifest["timings_ms"][suite] = ms;
    write_text_file(mpath.string(), manifest.dump(2) + "\n");

    return res.pass ? 0 : 1;
}

int cmd_report(const std::string& run_dir, const std::string& out_dir) {
    std::vector<std::pair<std::string, json>> reports;
    if (!fs::is_directory(run_dir))
        throw ConfigError("report: '" + run_dir + "' is not a directory");
    for (const auto& entry : fs::directory_iterator(run_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 12 && name.ends_with("_report.json")) {
            try {
                reports.emplace_back(name.substr(0, name.size() - 12),
                                     json::parse(read_text_file(entry.path().string())));
            } catch (const json::exception&) {
                // unreadable report: surface it as a failure row
                reports.emplace_back(name.substr(0, name.size() - 12),
                                     json{{"pass", false}, {"error", "unparseable"}});
            }
        }
    }
    if (reports.empty())
        throw ConfigError("report: no suite reports found in '" + run_dir + "'");
    std::sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
        const bool pa = a.second.value("pass", false);
        const bool pb = b.second.value("pass", false);
        if (pa != pb) return !pa; // failures first
        return a.first < b.first;
    });

    std::ostringstream summary;
    summary << "suite summary (failures first)\n";
    summary << "------------------------------\n";
    bool all_pass = true;
    for (const auto& [name, rep] : reports) {
        const bool pass = rep.value("pass", false);
        all_pass = all_pass && pass;
        summary << (pass ? "PASS " : "FAIL ") << name;
        if (rep.contains("n_cells"))
            summary << "  cells=" << rep["n_cells"] << " pass=" << rep["n_pass"];
        if (rep.contains("cells") && rep["cells"].is_array())
            summary << "  cells=" << rep["cells"].size();
        summary << "\n";
        if (!pass) {
            // list failing cells / rows / conditions
            auto list_failures = [&](const json& arr, const char* id_key) {
                if (!arr.is_array()) return;
                for (const auto& c : arr)
                    if (c.is_object() && !c.value("pass", true))
                        summary << "    failed: " << c.value(id_key, c.dump()) << "\n";
            };
            if (rep.contains("cells")) list_failures(rep["cells"], "test_id");
            if (rep.contains("rows")) list_failures(rep["rows"], "event");
            if (rep.contains("conditions")) list_failures(rep["conditions"], "condition");
        }
    }
    const fs::path out(out_dir.empty() ? run_dir : out_dir);
    write_text_file((out / "summary.txt").string(), summary.str());

    // plot-data series recovered from the reports
    for (const auto& [name, rep] : reports) {
        if (rep.contains("qv_convergence")) {
            std::string csv = "level,mesh,value\n";
            for (const auto& row : rep["qv_convergence"])
                csv += std::to_string(row["level"].get<std::size_t>()) + "," +
                       fmt(row["mesh"].get<double>()) + "," +
                       fmt(row["value"].get<double>()) + "\n";
            write_text_file((out / "qv_convergence.csv").string(), csv);
        }
        if (name == "continuity" && rep.contains("rows")) {
            std::string csv = "level,g,start_distance,estimate,stderr\n";
            for (const auto& row : rep["rows"])
                csv += std::to_string(row["level"].get<std::size_t>()) + "," +
                       row["g"].get<std::string>() + "," +
                       fmt(row["start_distance"].get<double>()) + "," +
                       fmt(row["estimate"].get<double>()) + "," +
                       fmt(row["stderr"].get<double>()) + "\n";
            write_text_file((out / "convergence_diagnostic.csv").string(), csv);
        }
    }
    return all_pass ? 0 : 1;
}

} // namespace pathdep

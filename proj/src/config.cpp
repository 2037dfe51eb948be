#include "pathdep/config.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace pathdep {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError("unknown config field '" + path + "." + it.key() + "'");
    }
}

template <class T>
T req(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key))
        throw ConfigError("missing config field '" + path + "." + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + path + "." + key + "' has the wrong type");
    }
}

template <class T>
T opt(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config field '" + path + "." + key + "' has the wrong type");
    }
}

} // namespace

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    check_keys(j, "$", {"schema_version", "model", "run", "verify", "output"});
    ExperimentConfig cfg;
    cfg.schema_version = req<int>(j, "$", "schema_version");
    if (cfg.schema_version != kSchemaVersion)
        throw ConfigError("unsupported schema_version (expected " +
                          std::to_string(kSchemaVersion) + ")");

    const json& model = j.contains("model") ? j.at("model") : json::object();
    check_keys(model, "model",
               {"state_dim", "horizon", "mesh", "coefficients", "jump_atoms"});
    cfg.state_dim = opt<int>(model, "model", "state_dim", 1);
    if (cfg.state_dim < 1) throw ConfigError("model.state_dim must be >= 1");
    cfg.horizon = opt<double>(model, "model", "horizon", 1.0);
    cfg.mesh = opt<double>(model, "model", "mesh", 1.0 / 256.0);
    if (!(cfg.horizon > 0.0) || !(cfg.mesh > 0.0))
        throw ConfigError("model.horizon and model.mesh must be positive");
    {
        const double ratio = cfg.horizon / cfg.mesh;
        if (std::abs(ratio - std::llround(ratio)) > 1e-9 * ratio)
            throw ConfigError("model.mesh must divide model.horizon");
    }
    if (model.contains("coefficients")) {
        const json& co = model.at("coefficients");
        check_keys(co, "model.coefficients",
                   {"preset", "beta0", "sigma0", "jump_scale", "kappa", "tau", "clip"});
        cfg.coefficients.preset = opt<std::string>(co, "model.coefficients", "preset", "constant");
        cfg.coefficients.beta0 =
            opt<std::vector<double>>(co, "model.coefficients", "beta0", {});
        if (co.contains("sigma0")) {
            // accept either a flat m*m list or a scalar (diagonal)
            if (co.at("sigma0").is_number()) {
                const double s = co.at("sigma0").get<double>();
                cfg.coefficients.sigma0.assign(
                    static_cast<std::size_t>(cfg.state_dim) * cfg.state_dim, 0.0);
                for (int d = 0; d < cfg.state_dim; ++d)
                    cfg.coefficients.sigma0[d * cfg.state_dim + d] = s;
            } else {
                cfg.coefficients.sigma0 =
                    req<std::vector<double>>(co, "model.coefficients", "sigma0");
                if (cfg.coefficients.sigma0.size() !=
                    static_cast<std::size_t>(cfg.state_dim) * cfg.state_dim)
                    throw ConfigError("model.coefficients.sigma0 must hold state_dim^2 entries");
            }
        }
        cfg.coefficients.jump_scale = opt<double>(co, "model.coefficients", "jump_scale", 1.0);
        cfg.coefficients.kappa = opt<double>(co, "model.coefficients", "kappa", 0.0);
        cfg.coefficients.tau = opt<double>(co, "model.coefficients", "tau", 0.25);
        cfg.coefficients.clip = opt<double>(co, "model.coefficients", "clip", 1.0);
    }
    cfg.coefficients.dim = cfg.state_dim;
    if (model.contains("jump_atoms")) {
        for (const auto& a : model.at("jump_atoms")) {
            check_keys(a, "model.jump_atoms[]", {"y", "mass"});
            auto y = req<std::vector<double>>(a, "model.jump_atoms[]", "y");
            const double mass = req<double>(a, "model.jump_atoms[]", "mass");
            double nrm = 0.0;
            for (double v : y) nrm += v * v;
            if (nrm == 0.0) throw ConfigError("model.jump_atoms[].y must be nonzero");
            if (!(mass > 0.0)) throw ConfigError("model.jump_atoms[].mass must be positive");
            cfg.jump_atoms.emplace_back(std::move(y), mass);
        }
    }

    const json& run = j.contains("run") ? j.at("run") : json::object();
    check_keys(run, "run", {"start_time", "initial_path", "initial_value", "n_paths", "seed"});
    cfg.start_time = opt<double>(run, "run", "start_time", 0.0);
    cfg.initial_path_file = opt<std::string>(run, "run", "initial_path", "");
    cfg.initial_value = opt<std::vector<double>>(run, "run", "initial_value", {});
    cfg.initial_value.resize(cfg.state_dim, 0.0);
    {
        const json& n = run.contains("n_paths") ? run.at("n_paths") : json(1000);
        if (!n.is_number_integer() || n.get<long long>() < 1)
            throw ConfigError("run.n_paths must be a positive integer");
        cfg.n_paths = n.get<std::size_t>();
    }
    cfg.seed = opt<std::uint64_t>(run, "run", "seed", 1);
    {
        const double ratio = cfg.start_time / cfg.mesh;
        if (std::abs(ratio - std::llround(ratio)) > 1e-9 * std::max(1.0, ratio))
            throw ConfigError("run.start_time must be a multiple of model.mesh");
        if (cfg.start_time < 0.0 || cfg.start_time > cfg.horizon)
            throw ConfigError("run.start_time must lie in [0, horizon]");
    }
    if (!cfg.initial_path_file.empty()) {
        std::ifstream probe(cfg.initial_path_file);
        if (!probe)
            throw ConfigError("run.initial_path file '" + cfg.initial_path_file +
                              "' does not exist");
    }

    const json& verify = j.contains("verify") ? j.at("verify") : json::object();
    check_keys(verify, "verify",
               {"suites", "z_crit", "theta_set", "event_bank_size", "times", "qv_levels",
                "density_windows", "tightness", "n_outer", "n_inner",
                "sabotage_generator", "scenario_file", "tolerance"});
    cfg.suites = opt<std::vector<std::string>>(verify, "verify", "suites", cfg.suites);
    cfg.z_crit = opt<double>(verify, "verify", "z_crit", 3.0);
    if (verify.contains("theta_set"))
        cfg.theta_set = req<std::vector<std::vector<double>>>(verify, "verify", "theta_set");
    for (auto& th : cfg.theta_set)
        if (th.size() != static_cast<std::size_t>(cfg.state_dim))
            throw ConfigError("verify.theta_set entries must have state_dim components");
    cfg.event_bank_size = opt<std::size_t>(verify, "verify", "event_bank_size", 8);
    cfg.times = opt<std::vector<double>>(verify, "verify", "times", cfg.times);
    for (double t : cfg.times)
        if (t < 0.0 || t > cfg.horizon)
            throw ConfigError("verify.times must lie in [0, horizon]");
    cfg.qv_levels = opt<std::size_t>(verify, "verify", "qv_levels", 8);
    cfg.density_windows =
        opt<std::vector<std::size_t>>(verify, "verify", "density_windows", cfg.density_windows);
    if (verify.contains("tightness")) {
        const json& tb = verify.at("tightness");
        check_keys(tb, "verify.tightness",
                   {"epsilon", "alphas", "window", "k_start", "k_cap", "theta_start"});
        cfg.tightness.epsilon = opt<double>(tb, "verify.tightness", "epsilon", 0.05);
        cfg.tightness.alphas =
            opt<std::vector<double>>(tb, "verify.tightness", "alphas", {0.5});
        cfg.tightness.window = opt<double>(tb, "verify.tightness", "window", 1.0);
        cfg.tightness.k_start = opt<double>(tb, "verify.tightness", "k_start", 1.0);
        cfg.tightness.k_cap = opt<double>(tb, "verify.tightness", "k_cap", 1048576.0);
        cfg.tightness.theta_start = opt<double>(tb, "verify.tightness", "theta_start", 1.0);
    }
    cfg.n_outer = opt<std::size_t>(verify, "verify", "n_outer", 2000);
    cfg.n_inner = opt<std::size_t>(verify, "verify", "n_inner", 2000);
    cfg.sabotage_generator = opt<bool>(verify, "verify", "sabotage_generator", false);
    cfg.scenario_file = opt<std::string>(verify, "verify", "scenario_file", "");
    cfg.tolerance = opt<double>(verify, "verify", "tolerance", 0.05);

    const json& output = j.contains("output") ? j.at("output") : json::object();
    check_keys(output, "output", {"directory", "formats"});
    cfg.out_dir = opt<std::string>(output, "output", "directory", "out");
    cfg.formats = opt<std::vector<std::string>>(output, "output", "formats", cfg.formats);

    return cfg;
}

ExperimentConfig load_config(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw ConfigError("cannot open config file '" + filename + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in '" + filename + "': " + e.what());
    }
    return parse_config(j);
}

json canonical_config(const ExperimentConfig& cfg) {
    json atoms = json::array();
    for (const auto& [y, mass] : cfg.jump_atoms)
        atoms.push_back(json{{"y", y}, {"mass", mass}});
    json j;
    j["schema_version"] = cfg.schema_version;
    j["model"] = {{"state_dim", cfg.state_dim},
                  {"horizon", cfg.horizon},
                  {"mesh", cfg.mesh},
                  {"coefficients",
                   {{"preset", cfg.coefficients.preset},
                    {"beta0", cfg.coefficients.beta0},
                    {"sigma0", cfg.coefficients.sigma0},
                    {"jump_scale", cfg.coefficients.jump_scale},
                    {"kappa", cfg.coefficients.kappa},
                    {"tau", cfg.coefficients.tau},
                    {"clip", cfg.coefficients.clip}}},
                  {"jump_atoms", atoms}};
    j["run"] = {{"start_time", cfg.start_time},
                {"initial_path", cfg.initial_path_file},
                {"initial_value", cfg.initial_value},
                {"n_paths", cfg.n_paths},
                {"seed", cfg.seed}};
    j["verify"] = {{"suites", cfg.suites},
                   {"z_crit", cfg.z_crit},
                   {"theta_set", cfg.theta_set},
                   {"event_bank_size", cfg.event_bank_size},
                   {"times", cfg.times},
                   {"qv_levels", cfg.qv_levels},
                   {"density_windows", cfg.density_windows},
                   {"tightness",
                    {{"epsilon", cfg.tightness.epsilon},
                     {"alphas", cfg.tightness.alphas},
                     {"window", cfg.tightness.window},
                     {"k_start", cfg.tightness.k_start},
                     {"k_cap", cfg.tightness.k_cap},
                     {"theta_start", cfg.tightness.theta_start}}},
                   {"n_outer", cfg.n_outer},
                   {"n_inner", cfg.n_inner},
                   {"sabotage_generator", cfg.sabotage_generator},
                   {"scenario_file", cfg.scenario_file},
                   {"tolerance", cfg.tolerance}};
    return j;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
    return sha256_hex(canonical_config(cfg).dump());
}

Model build_model(const ExperimentConfig& cfg) {
    Model model;
    model.jumps = JumpMeasure::none(cfg.state_dim);
    for (const auto& [y, mass] : cfg.jump_atoms) {
        auto atom = y;
        atom.resize(cfg.state_dim, 0.0);
        model.jumps.add_atom(atom, mass);
    }
    model.coeffs = make_coefficients(cfg.coefficients, model.jumps);
    model.grid = TimeGrid::uniform(cfg.horizon, cfg.mesh);
    return model;
}

InitialCondition build_initial(const ExperimentConfig& cfg, const GridPtr& grid) {
    if (!cfg.initial_path_file.empty()) {
        CadlagPath file_path = read_path_csv(cfg.initial_path_file);
        if (file_path.dim() != cfg.state_dim)
            throw ConfigError("initial path dimension does not match model.state_dim");
        // resample the file path onto the run grid (step convention)
        std::vector<double> values(grid->size() * cfg.state_dim);
        for (std::size_t k = 0; k < grid->size(); ++k) {
            const double t = std::min(grid->time(k), file_path.grid().horizon());
            const auto x = file_path.evaluate(t);
            std::copy(x.begin(), x.end(), values.begin() + k * cfg.state_dim);
        }
        return InitialCondition::make(cfg.start_time,
                                      CadlagPath(grid, cfg.state_dim, std::move(values)));
    }
    return InitialCondition::from_value(cfg.start_time, cfg.initial_value, grid);
}

namespace {

InitialCondition scenario_entry(const json& e, const std::string& path,
                                const GridPtr& grid, double /*horizon*/) {
    check_keys(e, path, {"s", "path", "value"});
    const double s = req<double>(e, path, "s");
    if (e.contains("path")) {
        const auto file = req<std::string>(e, path, "path");
        CadlagPath p = read_path_csv(file);
        std::vector<double> values(grid->size() * p.dim());
        for (std::size_t k = 0; k < grid->size(); ++k) {
            const double t = std::min(grid->time(k), p.grid().horizon());
            const auto x = p.evaluate(t);
            std::copy(x.begin(), x.end(), values.begin() + k * p.dim());
        }
        return InitialCondition::make(s, CadlagPath(grid, p.dim(), std::move(values)));
    }
    if (!e.contains("value"))
        throw ConfigError("scenario entry '" + path + "' needs a 'path' or a 'value'");
    return InitialCondition::from_value(s, req<std::vector<double>>(e, path, "value"), grid);
}

} // namespace

ConvergenceScenario load_scenario(const std::string& filename, const GridPtr& grid,
                                  double horizon) {
    std::ifstream in(filename);
    if (!in) throw ConfigError("cannot open scenario file '" + filename + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("scenario parse error in '" + filename + "': " + e.what());
    }
    check_keys(j, "scenario", {"target", "approximants"});
    if (!j.contains("target") || !j.contains("approximants"))
        throw ConfigError("scenario file needs 'target' and 'approximants'");
    ConvergenceScenario sc;
    sc.target = scenario_entry(j.at("target"), "scenario.target", grid, horizon);
    for (const auto& e : j.at("approximants"))
        sc.approximants.push_back(
            scenario_entry(e, "scenario.approximants[]", grid, horizon));
    if (sc.approximants.empty())
        throw ConfigError("scenario file lists no approximants");
    sc.test_bank = default_test_bank(horizon);
    return sc;
}

ConvergenceScenario default_scenario(const ExperimentConfig& cfg, const GridPtr& grid,
                                     std::size_t levels) {
    ConvergenceScenario sc;
    sc.target = build_initial(cfg, grid);
    for (std::size_t n = 1; n <= levels; ++n) {
        auto x = cfg.initial_value;
        x.resize(cfg.state_dim, 0.0);
        x[0] += std::pow(2.0, -static_cast<double>(n));
        sc.approximants.push_back(InitialCondition::from_value(cfg.start_time, x, grid));
    }
    sc.test_bank = default_test_bank(cfg.horizon);
    return sc;
}

} // namespace pathdep

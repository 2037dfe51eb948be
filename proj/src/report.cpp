#include "pathdep/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace pathdep {

using nlohmann::json;

json to_json(const CellResult& r) {
    return json{{"test_id", r.test_id}, {"f", r.function}, {"event", r.event},
                {"t", r.t},             {"u", r.u},         {"estimate", r.estimate},
                {"stderr", r.stderr_},  {"z", r.z},         {"pass", r.pass}};
}

json to_json(const MartingaleTestReport& r) {
    json cells = json::array();
    for (const auto& c : r.cells) cells.push_back(to_json(c));
    return json{{"cells", cells},
                {"z_crit", r.z_crit_base},
                {"z_crit_adjusted", r.z_crit_adjusted},
                {"n_cells", r.n_cells},
                {"n_pass", r.n_pass},
                {"pass_fraction", r.pass_fraction()},
                {"pass", r.pass}};
}

json to_json(const WeakGeneratorReport& r) {
    return json{{"t", r.t},
                {"lhs", r.lhs},
                {"rhs", r.rhs},
                {"estimate", r.discrepancy},
                {"stderr", r.stderr_},
                {"z", r.z},
                {"pass", r.pass}};
}

json to_json(const NestedReport& r) {
    return json{{"direct", r.direct},
                {"direct_stderr", r.direct_se},
                {"nested", r.nested},
                {"nested_stderr", r.nested_se},
                {"estimate", r.discrepancy},
                {"stderr", r.combined_se},
                {"z", r.z},
                {"n_outer", r.n_outer},
                {"n_inner", r.n_inner},
                {"pass", r.pass}};
}

json to_json(const FlowReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"event", row.event_f},
                            {"conditioning", row.event_g},
                            {"lhs", row.lhs},
                            {"lhs_stderr", row.lhs_se},
                            {"rhs", row.rhs},
                            {"rhs_stderr", row.rhs_se},
                            {"estimate", row.discrepancy},
                            {"stderr", row.combined_se},
                            {"z", row.z},
                            {"pass", row.pass}});
    return json{{"rows", rows},
                {"n_outer", r.n_outer},
                {"n_inner", r.n_inner},
                {"pass", r.pass}};
}

json to_json(const PinningReport& r) {
    return json{{"n_paths", r.n_paths}, {"mismatched", r.mismatched}, {"pass", r.pass}};
}

json to_json(const TrivialityReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"event", row.event},
                            {"frequency", row.frequency},
                            {"pass", row.pass}});
    return json{{"rows", rows}, {"pass", r.pass}};
}

json to_json(const TightnessCondition& r) {
    return json{{"condition", r.condition}, {"parameter", r.parameter},
                {"alpha", r.alpha},         {"frequency", r.frequency},
                {"stderr", r.stderr_},      {"pass", r.pass}};
}

json to_json(const TightnessVerdict& r) {
    json conds = json::array();
    for (const auto& c : r.conditions) conds.push_back(to_json(c));
    json thetas = json::object();
    for (const auto& [alpha, theta] : r.theta_per_alpha) {
        std::ostringstream key;
        key << alpha;
        thetas[key.str()] = theta;
    }
    return json{{"K", r.K},
                {"theta_per_alpha", thetas},
                {"conditions", conds},
                {"pass", r.pass}};
}

json to_json(const ConvergenceReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(json{{"level", row.level},
                            {"g", row.g},
                            {"start_distance", row.start_distance},
                            {"approx", row.approx},
                            {"approx_stderr", row.approx_se},
                            {"target", row.target},
                            {"target_stderr", row.target_se},
                            {"estimate", row.diff},
                            {"stderr", row.paired_se},
                            {"z", row.z}});
    return json{{"rows", rows},
                {"trend_score", r.trend_score},
                {"tolerance", r.tolerance},
                {"pass", r.pass}};
}

json to_json(const CoefficientProbeReport& r) {
    return json{{"beta_bounded", r.beta_bounded},
                {"sigma_bounded", r.sigma_bounded},
                {"jump_bounded", r.jump_bounded},
                {"beta_max", r.beta_max},
                {"sigma_max", r.sigma_max},
                {"jump_max", r.jump_max},
                {"beta_lipschitz", r.beta_lipschitz},
                {"sigma_lipschitz", r.sigma_lipschitz},
                {"jump_lipschitz", r.jump_lipschitz},
                {"non_anticipative", r.non_anticipative},
                {"witness_time", r.witness_time},
                {"probes", r.probes}};
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace pathdep

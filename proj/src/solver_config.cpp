#include <fstream>
#include <set>
#include <string>

#include "padreg/solver.hpp"

namespace padreg {

void SolverConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("solver config: " + what); };
    if (levels < 1) fail("levels must be >= 1");
    if (iters_per_level < 1) fail("iters_per_level must be >= 1");
    if (!(step_size > 0.0) || !std::isfinite(step_size)) fail("step_size must be positive");
    if (!(moment1 >= 0.0 && moment1 < 1.0)) fail("moment1 must lie in [0, 1)");
    if (!(moment2 >= 0.0 && moment2 < 1.0)) fail("moment2 must lie in [0, 1)");
    if (!(eps > 0.0)) fail("eps must be positive");
    if (!(lambda_reg >= 0.0) || !std::isfinite(lambda_reg)) fail("lambda_reg must be non-negative");
    if (!(stop_rel_tol >= 0.0)) fail("stop_rel_tol must be non-negative");
    for (const AxisCoefficients* p : {&model.x, &model.y})
        if (!std::isfinite(p->alpha) || !std::isfinite(p->beta) || !std::isfinite(p->gamma))
            fail("model coefficients must be finite");
}

namespace {

const std::set<std::string> kConfigKeys = {"levels",  "iters_per_level", "step_size",  "moment1",
                                           "moment2", "eps",             "lambda_reg", "df_variant",
                                           "model",   "stop_rel_tol",    "seed"};
const std::set<std::string> kModelKeys = {"kind", "alpha_x", "alpha_y", "beta_x", "beta_y", "gamma_x", "gamma_y"};

template <typename T>
T get(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("solver config: bad value for '") + key + "': " + e.what());
    }
}

DeformationModel model_from_json(const nlohmann::json& j) {
    if (j.is_string()) return DeformationModel::of(parse_deformation_kind(j.get<std::string>()));
    if (!j.is_object()) throw ConfigError("solver config: 'model' must be a string or an object");
    for (const auto& [key, _] : j.items())
        if (!kModelKeys.count(key)) throw ConfigError("solver config: unknown model key '" + key + "'");
    if (!j.contains("kind")) throw ConfigError("solver config: model object needs 'kind'");
    DeformationModel m = DeformationModel::of(parse_deformation_kind(get<std::string>(j, "kind", "")));
    m.x = {get(j, "alpha_x", 0.0), get(j, "beta_x", 1.0), get(j, "gamma_x", 0.0)};
    m.y = {get(j, "alpha_y", 0.0), get(j, "beta_y", 1.0), get(j, "gamma_y", 0.0)};
    return m;
}

}  // namespace

SolverConfig solver_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("solver config: expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (!kConfigKeys.count(key)) throw ConfigError("solver config: unknown key '" + key + "'");
    SolverConfig c;
    c.levels = get(j, "levels", c.levels);
    c.iters_per_level = get(j, "iters_per_level", c.iters_per_level);
    c.step_size = get(j, "step_size", c.step_size);
    c.moment1 = get(j, "moment1", c.moment1);
    c.moment2 = get(j, "moment2", c.moment2);
    c.eps = get(j, "eps", c.eps);
    c.lambda_reg = get(j, "lambda_reg", c.lambda_reg);
    if (j.contains("df_variant")) c.df_variant = parse_delta_force_variant(get<std::string>(j, "df_variant", ""));
    if (j.contains("model")) c.model = model_from_json(j.at("model"));
    c.stop_rel_tol = get(j, "stop_rel_tol", c.stop_rel_tol);
    c.seed = get(j, "seed", c.seed);
    c.validate();
    return c;
}

SolverConfig load_solver_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open solver config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("cannot parse solver config " + path.string() + ": " + e.what());
    }
    return solver_config_from_json(j);
}

nlohmann::json to_json(const SolverConfig& c) {
    return {{"levels", c.levels},
            {"iters_per_level", c.iters_per_level},
            {"step_size", c.step_size},
            {"moment1", c.moment1},
            {"moment2", c.moment2},
            {"eps", c.eps},
            {"lambda_reg", c.lambda_reg},
            {"df_variant", std::string(to_string(c.df_variant))},
            {"model",
             {{"kind", std::string(to_string(c.model.kind))},
              {"alpha_x", c.model.x.alpha},
              {"alpha_y", c.model.y.alpha},
              {"beta_x", c.model.x.beta},
              {"beta_y", c.model.y.beta},
              {"gamma_x", c.model.x.gamma},
              {"gamma_y", c.model.y.gamma}}},
            {"stop_rel_tol", c.stop_rel_tol},
            {"seed", c.seed}};
}

}  // namespace padreg

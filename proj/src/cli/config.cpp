#include <cmath>
#include <cstdint>
#include <set>
#include <string>

#include <json.hpp>

#include "aoapos/cli.hpp"

namespace aoapos::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad_type(const std::string& key, const char* want) {
    throw ConfigError("config key '" + key + "' must be " + want);
}

double get_double(const json& j, const std::string& key) {
    if (!j.is_number()) bad_type(key, "a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& key) {
    if (!j.is_number_integer()) bad_type(key, "an integer");
    const auto v = j.get<long long>();
    if (v < INT32_MIN || v > INT32_MAX) bad_type(key, "a 32-bit integer");
    return static_cast<int>(v);
}

std::uint64_t get_count(const json& j, const std::string& key) {
    if (!j.is_number_unsigned()) bad_type(key, "a nonnegative integer");
    return j.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& key) {
    if (!j.is_boolean()) bad_type(key, "a boolean");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& key) {
    if (!j.is_string()) bad_type(key, "a string");
    return j.get<std::string>();
}

std::vector<int> get_int_list(const json& j, const std::string& key) {
    if (!j.is_array()) bad_type(key, "a list of integers");
    std::vector<int> out;
    for (const auto& e : j) out.push_back(get_int(e, key));
    return out;
}

Eigen::Vector3d vec3(const json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 3) bad_type(key, "a list of three coordinates");
    return {get_double(j[0], key), get_double(j[1], key), get_double(j[2], key)};
}

}  // namespace

void apply_json(RunConfig& cfg, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    Scenario& sc = cfg.scenario;
    for (const auto& [key, v] : j.items()) {
        if (key == "theta_hat") cfg.theta_hat = get_double(v, key);
        else if (key == "phi_hat") cfg.phi_hat = get_double(v, key);
        else if (key == "theta") cfg.theta = get_double(v, key);
        else if (key == "phi") cfg.phi = get_double(v, key);
        else if (key == "n_y") sc.geom.n_y = get_int(v, key);
        else if (key == "n_z") sc.geom.n_z = get_int(v, key);
        else if (key == "d_over_lambda") cfg.d_over_lambda = get_double(v, key);
        else if (key == "lambda_c") sc.geom.lambda_c = get_double(v, key);
        else if (key == "s1") sc.grid.s1 = get_int(v, key);
        else if (key == "s2") sc.grid.s2 = get_int(v, key);
        else if (key == "trials") sc.trials = get_count(v, key);
        else if (key == "seed") sc.seed = get_count(v, key);
        else if (key == "noiseless") sc.noiseless = get_bool(v, key);
        else if (key == "mu") sc.mu = vec3(v, key);
        else if (key == "anchors") {
            if (!v.is_array()) throw ConfigError("config key 'anchors' must be a list");
            sc.anchors.clear();
            for (const auto& a : v) sc.anchors.push_back(vec3(a, key));
        } else if (key == "angle") cfg.angle = get_string(v, key);
        else if (key == "samples") cfg.samples = get_count(v, key);
        else if (key == "bins") cfg.bins = get_int(v, key);
        else if (key == "sizes") cfg.sizes = get_int_list(v, key);
        else if (key == "parameter") cfg.parameter = get_string(v, key);
        else if (key == "values") cfg.values = get_int_list(v, key);
        else if (key == "quantity") cfg.quantity = get_string(v, key);
        else if (key == "workers") cfg.workers = static_cast<unsigned>(get_count(v, key));
        else if (key == "out") cfg.out = get_string(v, key);
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

void RunConfig::finalize() {
    Scenario& sc = scenario;
    if (!(d_over_lambda > 0.0 && d_over_lambda <= 0.5)) throw ConfigError("d_over_lambda must lie in (0, 0.5]");
    if (!(sc.geom.lambda_c > 0.0) || !std::isfinite(sc.geom.lambda_c)) throw ConfigError("lambda_c must be positive");
    sc.geom.d_r = d_over_lambda * sc.geom.lambda_c;
    // d_over_lambda = 0.5 exactly must not fail the d <= lambda/2 check on rounding
    if (sc.geom.d_r > sc.geom.lambda_c / 2.0) sc.geom.d_r = sc.geom.lambda_c / 2.0;
    if (sc.geom.n_y < 1 || sc.geom.n_z < 1) throw ConfigError("n_y and n_z must be >= 1");
    if (sc.grid.s1 < 1 || sc.grid.s2 < 1) throw ConfigError("s1 and s2 must be >= 1");
    if (sc.trials < 1) throw ConfigError("trials must be >= 1");
    if (samples < 1) throw ConfigError("samples must be >= 1");
    if (bins < 1) throw ConfigError("bins must be >= 1");
    if (angle != "theta" && angle != "phi") throw ConfigError("angle must be 'theta' or 'phi'");
    static const std::set<std::string> params = {"anchor-size", "anchor-count", "grid-size"};
    if (!params.count(parameter)) throw ConfigError("parameter must be anchor-size, anchor-count or grid-size");
    if (quantity != "mse" && quantity != "variance") throw ConfigError("quantity must be 'mse' or 'variance'");
    if (sizes.empty()) throw ConfigError("sizes must not be empty");
    for (int s : sizes)
        if (s < 1) throw ConfigError("sizes must be >= 1");
    for (int v : values)
        if (v < 1) throw ConfigError("sweep values must be >= 1");
    for (double x : {theta_hat, phi_hat, theta, phi})
        if (!std::isfinite(x)) throw ConfigError("angles must be finite");
    if (sc.anchors.empty()) throw ConfigError("at least one anchor is required");
    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace aoapos::cli

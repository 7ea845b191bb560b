#include "liqd/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "liqd/morphology.hpp"

namespace liqd {
namespace {

const char* const kKeys[] = {"alpha",  "beta",       "threshold",   "block_size", "block_fill_ratio", "se_size",
                             "classifier", "noise_floor", "stride", "jobs",       "seed"};

bool known_key(const std::string& key) {
    for (const char* k : kKeys) {
        if (key == k) return true;
    }
    return false;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + text + "'");
    }
    return value;
}

}  // namespace

void PipelineConfig::validate() const {
    diff.validate();
    ellipse_se(se_size);
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

EnvLookup process_environment() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

ConfigLayer config_file_layer(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument(path.string() + ": config must be a JSON object");
    ConfigLayer layer;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) {
            layer[key] = value.get<std::string>();
        } else if (value.is_number()) {
            layer[key] = value.dump();
        } else {
            throw std::invalid_argument(path.string() + ": key '" + key + "' must be a number or string");
        }
    }
    return layer;
}

ConfigLayer environment_layer(const EnvLookup& env) {
    ConfigLayer layer;
    for (const char* key : kKeys) {
        std::string name = "LIQD_";
        for (const char* c = key; *c; ++c) name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
        if (auto v = env(name)) layer[key] = *v;
    }
    return layer;
}

PipelineConfig resolve_config(std::initializer_list<const ConfigLayer*> layers) {
    PipelineConfig cfg;
    double alpha = cfg.gray.alpha();
    double beta = cfg.gray.beta();
    for (const ConfigLayer* layer : layers) {
        if (!layer) continue;
        for (const auto& [key, value] : *layer) {
            if (!known_key(key)) throw std::invalid_argument("unknown config key '" + key + "'");
        }
        auto get = [&](const char* key) -> const std::string* {
            auto it = layer->find(key);
            return it == layer->end() ? nullptr : &it->second;
        };
        const std::string* a = get("alpha");
        const std::string* b = get("beta");
        if (a) alpha = parse_number<double>("alpha", *a);
        if (b) beta = parse_number<double>("beta", *b);
        if (a && !b) beta = 1.0 - alpha;
        if (b && !a) alpha = 1.0 - beta;
        if (auto v = get("threshold")) cfg.diff.threshold = parse_number<int>("threshold", *v);
        if (auto v = get("block_size")) cfg.diff.block_size = parse_number<int>("block_size", *v);
        if (auto v = get("block_fill_ratio")) cfg.diff.block_fill_ratio = parse_number<double>("block_fill_ratio", *v);
        if (auto v = get("se_size")) cfg.se_size = parse_number<int>("se_size", *v);
        if (auto v = get("classifier")) cfg.classifier_path = *v;
        if (auto v = get("noise_floor")) cfg.noise_floor = parse_number<std::size_t>("noise_floor", *v);
        if (auto v = get("stride")) cfg.stride = parse_number<int>("stride", *v);
        if (auto v = get("jobs")) cfg.jobs = parse_number<int>("jobs", *v);
        if (auto v = get("seed")) cfg.seed = parse_number<std::uint64_t>("seed", *v);
    }
    cfg.gray = GrayParams(alpha, beta);
    cfg.validate();
    return cfg;
}

PipelineConfig resolve_config(const std::optional<std::filesystem::path>& config_file, const EnvLookup& env,
                              const ConfigLayer& cli) {
    const ConfigLayer file = config_file ? config_file_layer(*config_file) : ConfigLayer{};
    const ConfigLayer environment = env ? environment_layer(env) : ConfigLayer{};
    return resolve_config({&file, &environment, &cli});
}

}  // namespace liqd

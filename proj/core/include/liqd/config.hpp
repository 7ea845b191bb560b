#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "liqd/diffseg.hpp"
#include "liqd/imaging.hpp"

namespace liqd {

struct PipelineConfig {
    GrayParams gray{};
    DiffParams diff{};
    int se_size = 5;
    /// Trained model file; empty selects the rule-based classifier.
    std::string classifier_path;
    std::size_t noise_floor = 20;
    int stride = 1;
    int jobs = 1;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument when any field breaks its invariant.
    void validate() const;
};

/// Flat key/value layer. Keys: alpha, beta, threshold, block_size,
/// block_fill_ratio, se_size, classifier, noise_floor, stride, jobs, seed.
using ConfigLayer = std::map<std::string, std::string>;

/// Returns the value of an environment variable, if set.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_environment();

/// Reads a JSON object of the keys above (numbers or strings).
ConfigLayer config_file_layer(const std::filesystem::path& path);

/// Collects LIQD_<KEY> variables (upper-case key names).
ConfigLayer environment_layer(const EnvLookup& env);

/// Applies layers over the defaults, lowest precedence first. A layer that
/// sets only one of alpha/beta also sets the other to keep their sum at 1.
/// Throws std::invalid_argument naming the key for unknown keys or values
/// that fail to parse, and validates the result.
PipelineConfig resolve_config(std::initializer_list<const ConfigLayer*> layers);

/// Default precedence: CLI flags > environment > config file > defaults.
PipelineConfig resolve_config(const std::optional<std::filesystem::path>& config_file, const EnvLookup& env,
                              const ConfigLayer& cli);

}  // namespace liqd

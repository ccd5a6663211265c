#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dipde/dynamics.hpp"
#include "dipde/jetgrid.hpp"
#include "dipde/regress.hpp"

namespace dipde {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Method { Sindy, EquivR, DiSindy };

std::string to_string(Method m);
Method parse_method(const std::string& s);

/// Invariant set declared in the config instead of the catalog one.
struct CustomInvariants {
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> generators;  // (xi, phi)
    std::vector<std::string> etas;
};

struct ExperimentConfig {
    std::string system = "kdv";
    Method method = Method::DiSindy;
    double lambda = 0.0;  // equiv-r only
    int runs = 10;
    int train_ics = 4;
    int test_ics = 4;
    SolverConfig solver = default_solver("kdv");
    IcFamily ic;
    double noise_sigma = 0.0;
    double threshold = 0.5;
    int max_iters = 20;
    /// Library override; empty inputs means the method default.
    std::optional<LibrarySpec> library;
    bool include_constant = false;
    FeatureOptions features;
    std::optional<CustomInvariants> invariants;
    std::uint64_t seed = 20240601;
    /// Steps of long-term prediction per test IC (0 disables it).
    int long_term_steps = 0;
    /// Internal ETDRK4 steps per sample when integrating discovered models.
    int integrate_substeps = 4;
    std::string output_dir = "out";

    /// Throws ConfigError.
    void validate() const;
};

/// Defaults for a system and method (threshold, solver, library).
ExperimentConfig default_config(const std::string& system, Method method);

std::string config_to_json(const ExperimentConfig& c, int indent = 2);
/// Missing keys keep the defaults of `default_config(system, method)`.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace dipde

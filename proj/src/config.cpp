#include "dipde/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dipde/invariants.hpp"

namespace dipde {

using json = nlohmann::ordered_json;

std::string to_string(Method m) {
    switch (m) {
    case Method::Sindy:
        return "sindy";
    case Method::EquivR:
        return "equiv-r";
    case Method::DiSindy:
        return "di-sindy";
    }
    return "?";
}

Method parse_method(const std::string& s) {
    if (s == "sindy") return Method::Sindy;
    if (s == "equiv-r") return Method::EquivR;
    if (s == "di-sindy") return Method::DiSindy;
    throw ConfigError("unknown method '" + s + "' (expected sindy, equiv-r or di-sindy)");
}

void ExperimentConfig::validate() const {
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (train_ics < 1 || test_ics < 0) throw ConfigError("train_ics must be >= 1 and test_ics >= 0");
    if (!(threshold > 0)) throw ConfigError("threshold must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(lambda >= 0)) throw ConfigError("lambda must be non-negative");
    if (!(noise_sigma >= 0)) throw ConfigError("noise_sigma must be non-negative");
    if (long_term_steps < 0 || integrate_substeps < 1) throw ConfigError("bad long-term settings");
    if (long_term_steps > 0 && test_ics < 1) throw ConfigError("long-term prediction needs test_ics >= 1");
    if (!invariants) {
        const auto ids = builtin_systems();
        if (std::find(ids.begin(), ids.end(), system) == ids.end())
            throw ConfigError("unknown system '" + system + "'");
    }
    try {
        solver.validate(system);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig default_config(const std::string& system, Method method) {
    ExperimentConfig c;
    c.system = system;
    c.method = method;
    c.solver = default_solver(system);
    c.threshold = system == "burgers" ? 5e-3 : 0.5;
    return c;
}

namespace {

json solver_json(const SolverConfig& s) {
    json j;
    j["nx"] = s.nx;
    j["length"] = s.length;
    j["dt"] = s.dt;
    j["nt"] = s.nt;
    j["transient"] = s.transient;
    j["scheme"] = to_string(s.scheme);
    j["dealias"] = s.dealias;
    j["substeps"] = s.substeps;
    j["parameters"] = s.parameters;
    return j;
}

void read_solver(const json& j, SolverConfig& s) {
    s.nx = j.value("nx", s.nx);
    s.length = j.value("length", s.length);
    s.dt = j.value("dt", s.dt);
    s.nt = j.value("nt", s.nt);
    s.transient = j.value("transient", s.transient);
    if (j.contains("scheme")) s.scheme = parse_scheme(j["scheme"].get<std::string>());
    s.dealias = j.value("dealias", s.dealias);
    s.substeps = j.value("substeps", s.substeps);
    if (j.contains("parameters"))
        for (const auto& [k, v] : j["parameters"].items()) s.parameters[k] = v.get<double>();
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c, int indent) {
    json j;
    j["system"] = c.system;
    j["method"] = to_string(c.method);
    j["lambda"] = c.lambda;
    j["runs"] = c.runs;
    j["train_ics"] = c.train_ics;
    j["test_ics"] = c.test_ics;
    j["solver"] = solver_json(c.solver);
    j["ic"] = {{"min_modes", c.ic.min_modes}, {"max_modes", c.ic.max_modes}, {"amp_lo", c.ic.amp_lo},
               {"amp_hi", c.ic.amp_hi},       {"k_lo", c.ic.k_lo},           {"k_hi", c.ic.k_hi},
               {"phase_lo", c.ic.phase_lo},   {"phase_hi", c.ic.phase_hi}};
    j["noise_sigma"] = c.noise_sigma;
    j["threshold"] = c.threshold;
    j["max_iters"] = c.max_iters;
    j["include_constant"] = c.include_constant;
    if (c.library) {
        std::vector<std::string> in;
        for (const auto& e : c.library->inputs) in.push_back(to_string(e));
        j["library"] = {{"mode", to_string(c.library->mode)}, {"inputs", in},
                        {"include_constant", c.library->include_constant}};
    }
    j["features"] = {{"t_stride", c.features.t_stride}, {"x_stride", c.features.x_stride}};
    if (c.invariants) {
        json gens = json::array();
        for (const auto& [xi, phi] : c.invariants->generators) gens.push_back({{"xi", xi}, {"phi", phi}});
        j["invariants"] = {{"generators", gens}, {"etas", c.invariants->etas}};
    }
    j["seed"] = c.seed;
    j["long_term_steps"] = c.long_term_steps;
    j["integrate_substeps"] = c.integrate_substeps;
    j["output_dir"] = c.output_dir;
    return j.dump(indent);
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        const std::string system = j.value("system", "kdv");
        const Method method = parse_method(j.value("method", "di-sindy"));
        ExperimentConfig c;
        try {
            c = default_config(system, method);
        } catch (const std::invalid_argument&) {
            c.system = system;  // custom system: solver must be given in full
            c.method = method;
        }
        c.lambda = j.value("lambda", c.lambda);
        c.runs = j.value("runs", c.runs);
        c.train_ics = j.value("train_ics", c.train_ics);
        c.test_ics = j.value("test_ics", c.test_ics);
        if (j.contains("solver")) read_solver(j["solver"], c.solver);
        if (j.contains("ic")) {
            const auto& i = j["ic"];
            c.ic.min_modes = i.value("min_modes", c.ic.min_modes);
            c.ic.max_modes = i.value("max_modes", c.ic.max_modes);
            c.ic.amp_lo = i.value("amp_lo", c.ic.amp_lo);
            c.ic.amp_hi = i.value("amp_hi", c.ic.amp_hi);
            c.ic.k_lo = i.value("k_lo", c.ic.k_lo);
            c.ic.k_hi = i.value("k_hi", c.ic.k_hi);
            c.ic.phase_lo = i.value("phase_lo", c.ic.phase_lo);
            c.ic.phase_hi = i.value("phase_hi", c.ic.phase_hi);
        }
        c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
        c.threshold = j.value("threshold", c.threshold);
        c.max_iters = j.value("max_iters", c.max_iters);
        c.include_constant = j.value("include_constant", c.include_constant);
        if (j.contains("library")) {
            const auto& l = j["library"];
            LibrarySpec s;
            s.mode = parse_library_mode(l.value("mode", "linear"));
            for (const auto& e : l.at("inputs")) s.inputs.push_back(parse(e.get<std::string>()));
            s.include_constant = l.value("include_constant", false);
            c.library = std::move(s);
        }
        if (j.contains("features")) {
            c.features.t_stride = j["features"].value("t_stride", 1);
            c.features.x_stride = j["features"].value("x_stride", 1);
        }
        if (j.contains("invariants")) {
            CustomInvariants ci;
            for (const auto& g : j["invariants"].at("generators"))
                ci.generators.emplace_back(g.at("xi").get<std::vector<std::string>>(),
                                           g.at("phi").get<std::vector<std::string>>());
            ci.etas = j["invariants"].at("etas").get<std::vector<std::string>>();
            c.invariants = std::move(ci);
        }
        c.seed = j.value("seed", c.seed);
        c.long_term_steps = j.value("long_term_steps", c.long_term_steps);
        c.integrate_substeps = j.value("integrate_substeps", c.integrate_substeps);
        c.output_dir = j.value("output_dir", c.output_dir);
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

}  // namespace dipde

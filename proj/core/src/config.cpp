#include "polaron/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "polaron/errors.hpp"

namespace polaron {

std::string_view to_string(Scenario s) noexcept {
    switch (s) {
    case Scenario::single:
        return "single";
    case Scenario::compare_variants:
        return "compare_variants";
    case Scenario::sigma_sweep:
        return "sigma_sweep";
    case Scenario::u_sweep:
        return "u_sweep";
    case Scenario::calibrate:
        return "calibrate";
    }
    return "unknown";
}

std::vector<double> default_sigma_grid() { return {0.20, 0.21, 0.25, 0.30, 0.40, 0.50, 0.60}; }
std::vector<double> default_u_grid() { return {-0.2, -0.1, 0.0, 0.1}; }

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_real(const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("expected a real number, got '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& text) {
    int v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("expected an integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw std::invalid_argument("expected true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) {
            out.push_back(parse_real(t));
        }
    }
    return out;
}

std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + format_real(v[i]);
    }
    return out;
}

template <class E>
E parse_enum(const std::string& text, std::initializer_list<std::pair<const char*, E>> options) {
    for (const auto& [name, value] : options) {
        if (text == name) {
            return value;
        }
    }
    std::string allowed;
    for (const auto& [name, value] : options) {
        allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    }
    throw std::invalid_argument("expected one of {" + allowed + "}, got '" + text + "'");
}

struct Field {
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

#define REAL_FIELD(key, member)                                                            \
    {                                                                                      \
        key, {                                                                             \
            [](ScenarioConfig& c, const std::string& v) { c.member = parse_real(v); },     \
                [](const ScenarioConfig& c) { return format_real(c.member); }              \
        }                                                                                  \
    }

#define INT_FIELD(key, member)                                                             \
    {                                                                                      \
        key, {                                                                             \
            [](ScenarioConfig& c, const std::string& v) { c.member = parse_int(v); },      \
                [](const ScenarioConfig& c) { return std::to_string(c.member); }           \
        }                                                                                  \
    }

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"scenario",
         {[](ScenarioConfig& c, const std::string& v) {
              c.scenario = parse_enum<Scenario>(v, {{"single", Scenario::single},
                                                    {"compare_variants", Scenario::compare_variants},
                                                    {"sigma_sweep", Scenario::sigma_sweep},
                                                    {"u_sweep", Scenario::u_sweep},
                                                    {"calibrate", Scenario::calibrate}});
          },
          [](const ScenarioConfig& c) { return std::string(to_string(c.scenario)); }}},
        REAL_FIELD("chain.J", chain.J),
        REAL_FIELD("chain.delta", chain.delta),
        REAL_FIELD("chain.mu", chain.mu),
        REAL_FIELD("chain.U", chain.U),
        INT_FIELD("chain.n_sites", chain.n_sites),
        {"chain.initial_pairing",
         {[](ScenarioConfig& c, const std::string& v) {
              c.initial_pairing = parse_enum<InitialPairing>(
                  v, {{"bare", InitialPairing::bare},
                      {"dressed_zero_temperature", InitialPairing::dressed_zero_temperature}});
          },
          [](const ScenarioConfig& c) {
              return std::string(c.initial_pairing == InitialPairing::bare ? "bare"
                                                                           : "dressed_zero_temperature");
          }}},
        {"chain.majorana_modes",
         {[](ScenarioConfig& c, const std::string& v) {
              c.mode_basis = parse_enum<ModeBasis>(
                  v, {{"initial", ModeBasis::initial}, {"renormalized", ModeBasis::renormalized}});
          },
          [](const ScenarioConfig& c) {
              return std::string(c.mode_basis == ModeBasis::initial ? "initial" : "renormalized");
          }}},
        REAL_FIELD("chain.doublet_gap", doublet_gap),
        REAL_FIELD("bath.f_ph", bath.f_ph),
        REAL_FIELD("bath.sigma", bath.sigma),
        REAL_FIELD("bath.c_s", bath.c_s),
        REAL_FIELD("bath.temperature", bath.temperature),
        REAL_FIELD("bath.k_min", bath.k_min),
        REAL_FIELD("bath.k_max", bath.k_max),
        INT_FIELD("bath.n_quad", bath.n_quad),
        REAL_FIELD("bath.hbar_over_kb", bath.hbar_over_kb),
        {"bath.norm_scale",
         {[](ScenarioConfig& c, const std::string& v) {
              c.norm_scale = v == "calibrated" ? std::nullopt : std::optional<double>(parse_real(v));
          },
          [](const ScenarioConfig& c) {
              return c.norm_scale ? format_real(*c.norm_scale) : std::string("calibrated");
          }}},
        REAL_FIELD("calibration.sigma", calibration_sigma),
        REAL_FIELD("calibration.target_B", calibration_target_b),
        {"evolution.variant",
         {[](ScenarioConfig& c, const std::string& v) { c.evolution.variant = parse_variant(v); },
          [](const ScenarioConfig& c) { return std::string(to_string(c.evolution.variant)); }}},
        REAL_FIELD("evolution.dt", evolution.dt),
        REAL_FIELD("evolution.t_max", evolution.t_max),
        {"evolution.lindblad_rate",
         {[](ScenarioConfig& c, const std::string& v) {
              c.lindblad_rate = v == "auto" ? std::nullopt : std::optional<double>(parse_real(v));
          },
          [](const ScenarioConfig& c) {
              return c.lindblad_rate ? format_real(*c.lindblad_rate) : std::string("auto");
          }}},
        REAL_FIELD("evolution.lindblad_fit_time", lindblad_fit_time),
        REAL_FIELD("evolution.steady_window_fraction", evolution.steady_window_fraction),
        REAL_FIELD("evolution.drift_tolerance", evolution.drift_tolerance),
        {"evolution.abort_on_health",
         {[](ScenarioConfig& c, const std::string& v) { c.evolution.health.abort = parse_bool(v); },
          [](const ScenarioConfig& c) { return std::string(c.evolution.health.abort ? "true" : "false"); }}},
        REAL_FIELD("evolution.max_trace_error", evolution.health.max_trace_error),
        REAL_FIELD("evolution.min_eigenvalue", evolution.health.min_eigenvalue),
        {"sweep.values",
         {[](ScenarioConfig& c, const std::string& v) { c.sweep_values = parse_list(v); },
          [](const ScenarioConfig& c) { return format_list(c.sweep_values); }}},
        {"output.dir",
         {[](ScenarioConfig& c, const std::string& v) { c.output_dir = v; },
          [](const ScenarioConfig& c) { return c.output_dir.string(); }}},
        INT_FIELD("output.stride", output_stride),
        INT_FIELD("run.threads", threads),
    };
    return table;
}

#undef REAL_FIELD
#undef INT_FIELD

} // namespace

void ScenarioConfig::validate() const {
    chain.validate();
    bath.validate();
    if (doublet_gap <= 0.0) {
        throw ConfigError("chain.doublet_gap must be positive");
    }
    if (norm_scale && !(*norm_scale > 0.0)) {
        throw ConfigError("bath.norm_scale must be positive");
    }
    if (!(calibration_target_b > 0.0 && calibration_target_b < 1.0)) {
        throw ConfigError("calibration.target_B must lie in (0, 1)");
    }
    if (!(calibration_sigma > 0.0)) {
        throw ConfigError("calibration.sigma must be positive");
    }
    if (evolution.dt < 0.0) {
        throw ConfigError("evolution.dt must be positive (or 0 for automatic)");
    }
    if (evolution.t_max < 0.0) {
        throw ConfigError("evolution.t_max must be positive (or 0 for 50 / J)");
    }
    if (!(evolution.steady_window_fraction > 0.0 && evolution.steady_window_fraction < 1.0)) {
        throw ConfigError("evolution.steady_window_fraction must lie in (0, 1)");
    }
    if (!(evolution.drift_tolerance > 0.0)) {
        throw ConfigError("evolution.drift_tolerance must be positive");
    }
    if (lindblad_rate && *lindblad_rate < 0.0) {
        throw ConfigError("evolution.lindblad_rate must be non-negative");
    }
    if (lindblad_fit_time < 0.0) {
        throw ConfigError("evolution.lindblad_fit_time must be non-negative");
    }
    if ((scenario == Scenario::sigma_sweep || scenario == Scenario::u_sweep) && sweep_values.empty()) {
        throw ConfigError("sweep.values must be non-empty for sweep scenarios");
    }
    if (scenario == Scenario::sigma_sweep) {
        for (double s : sweep_values) {
            if (!(s > 0.0)) {
                throw ConfigError("sweep.values: sigma must be positive");
            }
        }
    }
    if (output_stride < 1) {
        throw ConfigError("output.stride must be at least 1");
    }
    if (threads < 1) {
        throw ConfigError("run.threads must be at least 1");
    }
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [key, field] : fields()) {
        out.emplace_back(key, field.get(*this));
    }
    return out;
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    bool sweep_given = false;
    std::map<std::string, int> seen;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no);
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto& table = fields();
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
        if (it == table.end()) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
        if (auto prev = seen.find(key); prev != seen.end()) {
            throw ConfigError(where + ": key '" + key + "' already set on line " +
                              std::to_string(prev->second));
        }
        seen[key] = line_no;
        try {
            it->second.set(cfg, value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ": " + key + ": " + e.what());
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + key + ": " + e.what());
        }
        sweep_given = sweep_given || key == "sweep.values";
    }
    if (!sweep_given) {
        if (cfg.scenario == Scenario::sigma_sweep) {
            cfg.sweep_values = default_sigma_grid();
        } else if (cfg.scenario == Scenario::u_sweep) {
            cfg.sweep_values = default_u_grid();
        }
    }
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        // name the offending key's line when the message starts with it
        const std::string msg = e.what();
        for (const auto& [key, line_no2] : seen) {
            if (msg.rfind(key, 0) == 0) {
                throw ConfigError("line " + std::to_string(line_no2) + ": " + msg);
            }
        }
        throw;
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace polaron

#include "qotto/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qotto/errors.hpp"

namespace qotto {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
    throw ConfigError(std::string(key) + ": expected " + expected + ", got '" + std::string(value) +
                      "'");
}

double to_double(std::string_view key, std::string_view v) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a number");
    return x;
}

long long to_integer(std::string_view key, std::string_view v) {
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
    return x;
}

int to_int(std::string_view key, std::string_view v) {
    const long long x = to_integer(key, v);
    if (x < -2147483647LL || x > 2147483647LL) bad_value(key, v, "a 32-bit integer");
    return int(x);
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        bad_value(key, v, "a non-negative integer");
    }
    return x;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    bad_value(key, v, "true or false");
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

struct KeySpec {
    std::string key;
    std::function<void(CycleConfig&, std::string_view)> set;
    std::function<std::string(const CycleConfig&)> get;
};

#define QOTTO_DOUBLE_KEY(name, field)                                                   \
    KeySpec {                                                                           \
        name, [](CycleConfig& c, std::string_view v) { c.field = to_double(name, v); }, \
            [](const CycleConfig& c) { return format_double(c.field); }                 \
    }

#define QOTTO_INT_KEY(name, field)                                                   \
    KeySpec {                                                                        \
        name, [](CycleConfig& c, std::string_view v) { c.field = to_int(name, v); }, \
            [](const CycleConfig& c) { return std::to_string(c.field); }             \
    }

#define QOTTO_BOOL_KEY(name, field)                                                   \
    KeySpec {                                                                         \
        name, [](CycleConfig& c, std::string_view v) { c.field = to_bool(name, v); }, \
            [](const CycleConfig& c) { return std::string(bool_text(c.field)); }      \
    }

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> table{
        QOTTO_DOUBLE_KEY("model.omega_m", params.omega_m),
        QOTTO_DOUBLE_KEY("model.G", params.G),
        QOTTO_DOUBLE_KEY("model.delta_i", params.delta_i),
        QOTTO_DOUBLE_KEY("model.delta_f", params.delta_f),
        QOTTO_DOUBLE_KEY("model.kappa", params.kappa),
        QOTTO_DOUBLE_KEY("model.gamma", params.gamma),
        QOTTO_DOUBLE_KEY("model.nbar_th", params.nbar_th),
        QOTTO_INT_KEY("space.n_photon", dims.n_photon),
        QOTTO_INT_KEY("space.n_phonon", dims.n_phonon),
        KeySpec{"meas.scheme",
                [](CycleConfig& c, std::string_view v) { c.meas.scheme = parse_scheme(v); },
                [](const CycleConfig& c) { return std::string(to_string(c.meas.scheme)); }},
        QOTTO_DOUBLE_KEY("meas.lambda", meas.lambda),
        QOTTO_BOOL_KEY("meas.all_strokes", monitor_all_strokes),
        QOTTO_DOUBLE_KEY("stepper.dt", stepper.dt),
        KeySpec{"stepper.seed",
                [](CycleConfig& c, std::string_view v) { c.stepper.seed = to_u64("stepper.seed", v); },
                [](const CycleConfig& c) { return std::to_string(c.stepper.seed); }},
        QOTTO_BOOL_KEY("stepper.renorm_every_step", stepper.renorm_every_step),
        QOTTO_DOUBLE_KEY("cycle.t1", t1),
        QOTTO_DOUBLE_KEY("cycle.t2", t2),
        QOTTO_DOUBLE_KEY("cycle.t3", t3),
        QOTTO_DOUBLE_KEY("cycle.t4", t4),
        QOTTO_INT_KEY("cycle.n_traj", n_traj),
        KeySpec{"cycle.stroke4_mode",
                [](CycleConfig& c, std::string_view v) {
                    if (v == "evolve") c.stroke4_mode = Stroke4Mode::evolve;
                    else if (v == "resample") c.stroke4_mode = Stroke4Mode::resample;
                    else bad_value("cycle.stroke4_mode", v, "evolve or resample");
                },
                [](const CycleConfig& c) { return std::string(to_string(c.stroke4_mode)); }},
        KeySpec{"cycle.initial_basis",
                [](CycleConfig& c, std::string_view v) {
                    if (v == "polariton") c.initial_basis = InitialBasis::polariton;
                    else if (v == "bare") c.initial_basis = InitialBasis::bare;
                    else bad_value("cycle.initial_basis", v, "polariton or bare");
                },
                [](const CycleConfig& c) { return std::string(to_string(c.initial_basis)); }},
        KeySpec{"cycle.schedule",
                [](CycleConfig& c, std::string_view v) {
                    if (v == "linear") c.schedule_kind = ScheduleKind::linear;
                    else if (v == "gap_adaptive") c.schedule_kind = ScheduleKind::gap_adaptive;
                    else bad_value("cycle.schedule", v, "linear or gap_adaptive");
                },
                [](const CycleConfig& c) { return std::string(to_string(c.schedule_kind)); }},
        KeySpec{"cycle.dissipation",
                [](CycleConfig& c, std::string_view v) {
                    const auto items = split_list(v);
                    if (items.size() != 4) bad_value("cycle.dissipation", v, "four booleans");
                    for (int s = 0; s < 4; ++s) c.dissipation[s] = to_bool("cycle.dissipation", items[s]);
                },
                [](const CycleConfig& c) {
                    std::string out;
                    for (int s = 0; s < 4; ++s) {
                        if (s) out += ", ";
                        out += bool_text(c.dissipation[s]);
                    }
                    return out;
                }},
        QOTTO_INT_KEY("cycle.last_stroke", last_stroke),
        QOTTO_DOUBLE_KEY("output.stride", output.stride),
        QOTTO_BOOL_KEY("output.full_resolution", output.full_resolution),
        QOTTO_DOUBLE_KEY("output.hist_min", output.hist.lo),
        QOTTO_DOUBLE_KEY("output.hist_max", output.hist.hi),
        QOTTO_DOUBLE_KEY("output.hist_width", output.hist.width),
        KeySpec{"sweep.lambdas",
                [](CycleConfig& c, std::string_view v) {
                    c.sweep.lambdas.clear();
                    for (auto item : split_list(v)) c.sweep.lambdas.push_back(to_double("sweep.lambdas", item));
                },
                [](const CycleConfig& c) {
                    std::string out;
                    for (std::size_t k = 0; k < c.sweep.lambdas.size(); ++k) {
                        if (k) out += ", ";
                        out += format_double(c.sweep.lambdas[k]);
                    }
                    return out;
                }},
        KeySpec{"sweep.schemes",
                [](CycleConfig& c, std::string_view v) {
                    c.sweep.schemes.clear();
                    for (auto item : split_list(v)) c.sweep.schemes.push_back(parse_scheme(item));
                },
                [](const CycleConfig& c) {
                    std::string out;
                    for (std::size_t k = 0; k < c.sweep.schemes.size(); ++k) {
                        if (k) out += ", ";
                        out += to_string(c.sweep.schemes[k]);
                    }
                    return out;
                }},
    };
    return table;
}

#undef QOTTO_DOUBLE_KEY
#undef QOTTO_INT_KEY
#undef QOTTO_BOOL_KEY

const KeySpec& find_key(std::string_view key) {
    for (const auto& spec : key_table()) {
        if (spec.key == key) return spec;
    }
    throw ConfigError(std::string(key) + ": unknown key");
}

// "model.G: ..." -> "model.G"
std::string key_of(const std::string& message) {
    const auto colon = message.find(':');
    return colon == std::string::npos ? std::string() : message.substr(0, colon);
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

Scheme parse_scheme(std::string_view text) {
    if (text == "none") return Scheme::none;
    if (text == "absorptive") return Scheme::absorptive;
    if (text == "dispersive") return Scheme::dispersive;
    throw ConfigError("meas.scheme: expected none, absorptive or dispersive, got '" +
                      std::string(text) + "'");
}

void set_config_value(CycleConfig& config, std::string_view key, std::string_view value) {
    find_key(key).set(config, value);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& spec : key_table()) keys.push_back(spec.key);
    return keys;
}

std::string emit_config(const CycleConfig& config) {
    std::string out;
    for (const auto& spec : key_table()) out += spec.key + " = " + spec.get(config) + "\n";
    return out;
}

CycleConfig parse_config_text(std::string_view text, const std::string& source,
                              const std::vector<std::string>& overrides) {
    CycleConfig config;
    std::map<std::string, int> line_of;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where + "expected 'key = value', got '" + std::string(line) + "'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (line_of.count(key)) {
            throw ConfigError(where + key + ": duplicate key (first set on line " +
                              std::to_string(line_of[key]) + ")");
        }
        try {
            set_config_value(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
        line_of[key] = line_no;
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set " + ov + ": expected key=value");
        }
        const std::string key(trim(std::string_view(ov).substr(0, eq)));
        try {
            set_config_value(config, key, trim(std::string_view(ov).substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("--set: ") + e.what());
        }
        line_of.erase(key);
    }
    try {
        config.validate();
    } catch (const ConfigError& e) {
        const std::string key = key_of(e.what());
        const auto it = line_of.find(key);
        if (it != line_of.end()) {
            throw ConfigError(source + ":" + std::to_string(it->second) + ": " + e.what());
        }
        throw;
    }
    return config;
}

CycleConfig parse_config_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path, overrides);
}

}  // namespace qotto

#include "dickeflow/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dickeflow/errors.hpp"

namespace dickeflow::sweep {

using nlohmann::json;

const char* to_string(Mode m) {
    switch (m) {
        case Mode::dicke_flow: return "dicke-flow";
        case Mode::oscillator_flow: return "oscillator-flow";
        case Mode::analytic_flow: return "analytic-flow";
        case Mode::rectification: return "rectification";
        case Mode::rect_max: return "rect-max";
        case Mode::modes_scan: return "modes-scan";
    }
    return "?";
}

std::optional<Mode> mode_from_string(std::string_view name) {
    for (Mode m : {Mode::dicke_flow, Mode::oscillator_flow, Mode::analytic_flow,
                   Mode::rectification, Mode::rect_max, Mode::modes_scan}) {
        if (name == to_string(m)) return m;
    }
    return std::nullopt;
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw ConfigError(origin + ": " + what);
}

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

double require_number(const json& j, const std::string& origin, const std::string& field) {
    if (!j.is_number()) fail(origin, "field '" + field + "' must be a number");
    return j.get<double>();
}

int require_int(const json& j, const std::string& origin, const std::string& field) {
    if (!j.is_number_integer()) fail(origin, "field '" + field + "' must be an integer");
    return j.get<int>();
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& origin, const std::string& where) {
    for (const auto& item : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return item.key() == k;
            }) == allowed.end()) {
            fail(origin, "unknown field '" + where + item.key() + "'");
        }
    }
}

std::vector<double> parse_axis(const json& j, const std::string& origin, const std::string& field) {
    std::vector<double> out;
    if (j.is_array()) {
        if (j.empty()) fail(origin, "sweep axis '" + field + "' must be non-empty");
        for (const auto& v : j) out.push_back(require_number(v, origin, field));
        return out;
    }
    if (j.is_object()) {
        check_keys(j, {"start", "stop", "points"}, origin, field + ".");
        if (!j.contains("start") || !j.contains("stop") || !j.contains("points")) {
            fail(origin, "grid '" + field + "' needs start, stop, points");
        }
        const double start = require_number(j.at("start"), origin, field + ".start");
        const double stop = require_number(j.at("stop"), origin, field + ".stop");
        const int points = require_int(j.at("points"), origin, field + ".points");
        if (points < 1) fail(origin, "grid '" + field + ".points' must be >= 1");
        if (points == 1) return {start};
        out.resize(points);
        for (int i = 0; i < points; ++i) {
            out[i] = start + (stop - start) * static_cast<double>(i) / (points - 1);
        }
        return out;
    }
    fail(origin, "sweep axis '" + field + "' must be an array or a {start,stop,points} grid");
}

void parse_model(const json& j, const std::string& origin, spectra::SystemParams& model) {
    check_keys(j, {"omega_a", "epsilon", "lambda", "gamma", "n_qubits", "n_fock", "n_fock_b"},
               origin, "model.");
    if (j.contains("omega_a")) model.omega_a = require_number(j.at("omega_a"), origin, "model.omega_a");
    if (j.contains("epsilon")) model.epsilon = require_number(j.at("epsilon"), origin, "model.epsilon");
    if (j.contains("lambda")) model.lambda = require_number(j.at("lambda"), origin, "model.lambda");
    if (j.contains("gamma")) model.gamma = require_number(j.at("gamma"), origin, "model.gamma");
    if (j.contains("n_qubits")) model.n_qubits = require_int(j.at("n_qubits"), origin, "model.n_qubits");
    if (j.contains("n_fock")) model.n_fock = require_int(j.at("n_fock"), origin, "model.n_fock");
    if (j.contains("n_fock_b")) model.n_fock_b = require_int(j.at("n_fock_b"), origin, "model.n_fock_b");
}

void parse_reservoir(const json& j, const std::string& origin, const std::string& where,
                     dme::ReservoirParams& res) {
    check_keys(j, {"alpha", "omega_c", "temperature"}, origin, where);
    if (j.contains("alpha")) res.alpha = require_number(j.at("alpha"), origin, where + "alpha");
    if (j.contains("omega_c")) res.omega_c = require_number(j.at("omega_c"), origin, where + "omega_c");
    if (j.contains("temperature")) {
        res.temperature = require_number(j.at("temperature"), origin, where + "temperature");
    }
}

SweepConfig from_json(const json& doc, const std::string& origin) {
    if (!doc.is_object()) fail(origin, "top level must be a JSON object");
    check_keys(doc,
               {"schema_version", "mode", "model", "reservoirs", "sweep", "output", "threads",
                "convergence_check"},
               origin, "");

    if (doc.contains("schema_version")) {
        const int v = require_int(doc.at("schema_version"), origin, "schema_version");
        if (v != schema_version) {
            fail(origin, "unsupported schema_version " + std::to_string(v) + " (expected " +
                             std::to_string(schema_version) + ")");
        }
    }

    SweepConfig cfg;

    if (!doc.contains("mode")) fail(origin, "missing required field 'mode'");
    if (!doc.at("mode").is_string()) fail(origin, "field 'mode' must be a string");
    const auto mode = mode_from_string(doc.at("mode").get<std::string>());
    if (!mode) {
        fail(origin, "field 'mode': unknown mode '" + doc.at("mode").get<std::string>() +
                         "' (expected one of dicke-flow, oscillator-flow, analytic-flow, "
                         "rectification, rect-max, modes-scan)");
    }
    cfg.mode = *mode;

    if (doc.contains("model")) parse_model(doc.at("model"), origin, cfg.model);
    try {
        cfg.model.validate();
        if (cfg.model.n_fock_b < 1) throw std::invalid_argument("SystemParams: n_fock_b must be >= 1");
    } catch (const std::invalid_argument& err) {
        fail(origin, err.what());
    }

    if (doc.contains("reservoirs")) {
        const auto& res = doc.at("reservoirs");
        check_keys(res, {"q", "r"}, origin, "reservoirs.");
        if (res.contains("q")) parse_reservoir(res.at("q"), origin, "reservoirs.q.", cfg.res_q);
        if (res.contains("r")) parse_reservoir(res.at("r"), origin, "reservoirs.r.", cfg.res_r);
    }
    cfg.res_q.label = dme::Bath::q;
    cfg.res_r.label = dme::Bath::r;
    try {
        cfg.res_q.validate();
        cfg.res_r.validate();
    } catch (const std::invalid_argument& err) {
        fail(origin, std::string("reservoirs: ") + err.what());
    }

    // Axes default to singletons from the model block.
    cfg.lambdas = {cfg.model.lambda};
    cfg.gammas = {cfg.model.gamma};
    cfg.qubit_counts = {cfg.model.n_qubits};

    bool qubit_axis_given = false, delta_axis_given = false;
    if (doc.contains("sweep")) {
        const auto& sw = doc.at("sweep");
        check_keys(sw, {"lambda", "gamma", "n_qubits", "delta_t", "t0"}, origin, "sweep.");
        if (sw.contains("lambda")) cfg.lambdas = parse_axis(sw.at("lambda"), origin, "sweep.lambda");
        if (sw.contains("gamma")) cfg.gammas = parse_axis(sw.at("gamma"), origin, "sweep.gamma");
        if (sw.contains("n_qubits")) {
            qubit_axis_given = true;
            cfg.qubit_counts.clear();
            for (double v : parse_axis(sw.at("n_qubits"), origin, "sweep.n_qubits")) {
                if (v != std::floor(v)) fail(origin, "sweep.n_qubits values must be integers");
                cfg.qubit_counts.push_back(static_cast<int>(v));
            }
        }
        if (sw.contains("delta_t")) {
            delta_axis_given = true;
            cfg.delta_ts = parse_axis(sw.at("delta_t"), origin, "sweep.delta_t");
        }
        if (sw.contains("t0")) cfg.t0 = require_number(sw.at("t0"), origin, "sweep.t0");
    }

    for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
        if (!(cfg.lambdas[i] >= 0.0)) {
            fail(origin, "sweep.lambda[" + std::to_string(i) + "]: lambda must be >= 0");
        }
    }
    for (std::size_t i = 0; i < cfg.gammas.size(); ++i) {
        if (!(cfg.gammas[i] >= 0.0)) {
            fail(origin, "sweep.gamma[" + std::to_string(i) + "]: gamma must be >= 0");
        }
    }
    for (std::size_t i = 0; i < cfg.qubit_counts.size(); ++i) {
        if (cfg.qubit_counts[i] < 1) {
            fail(origin, "sweep.n_qubits[" + std::to_string(i) + "]: n_qubits must be >= 1");
        }
    }

    const bool rect_mode = cfg.mode == Mode::rectification || cfg.mode == Mode::rect_max;
    if (rect_mode) {
        if (!(cfg.t0 > 0.0)) fail(origin, "sweep.t0 must be > 0");
        if (cfg.delta_ts.empty()) cfg.delta_ts = rect::default_bias_grid(cfg.model.omega_a);
        for (std::size_t i = 0; i < cfg.delta_ts.size(); ++i) {
            const double dt = cfg.delta_ts[i];
            if (!(dt >= 0.0) || !(dt < 2.0 * cfg.t0)) {
                fail(origin, "sweep.delta_t[" + std::to_string(i) + "]=" + std::to_string(dt) +
                                 ": requires 0 <= delta_t < 2*t0 (negative temperature otherwise)");
            }
        }
    } else if (delta_axis_given) {
        fail(origin, "sweep.delta_t applies to rectification modes only");
    }

    const bool has_qubit_axis = cfg.mode == Mode::dicke_flow || rect_mode;
    if (!has_qubit_axis && qubit_axis_given && cfg.qubit_counts.size() > 1) {
        fail(origin, std::string("sweep.n_qubits does not apply to mode ") + to_string(cfg.mode));
    }

    if (cfg.mode == Mode::analytic_flow) {
        for (double g : cfg.gammas) {
            if (g != 0.0 && g != 1.0) {
                fail(origin, "analytic-flow requires gamma values in {0, 1} (closed forms exist "
                             "only at the limits)");
            }
        }
    }

    if (doc.contains("output")) {
        const auto& out = doc.at("output");
        check_keys(out, {"path", "format"}, origin, "output.");
        if (out.contains("path")) {
            if (!out.at("path").is_string()) fail(origin, "output.path must be a string");
            cfg.output_path = out.at("path").get<std::string>();
        }
        if (out.contains("format")) {
            if (!out.at("format").is_string()) fail(origin, "output.format must be a string");
            const auto f = out.at("format").get<std::string>();
            if (f == "csv") {
                cfg.format = OutputFormat::csv;
            } else if (f == "json-lines") {
                cfg.format = OutputFormat::json_lines;
            } else {
                fail(origin, "output.format must be 'csv' or 'json-lines'");
            }
        }
    }

    if (doc.contains("threads")) {
        cfg.threads = require_int(doc.at("threads"), origin, "threads");
        if (cfg.threads < 1) fail(origin, "threads must be >= 1");
    }
    if (doc.contains("convergence_check")) {
        if (!doc.at("convergence_check").is_boolean()) {
            fail(origin, "convergence_check must be a boolean");
        }
        cfg.convergence_check = doc.at("convergence_check").get<bool>();
    }
    return cfg;
}

void apply_override(json& doc, const std::string& spec, const std::string& origin) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        fail(origin, "override '" + spec + "' must look like key.path=value");
    }
    const std::string path = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // bare strings pass through
    }

    json* node = &doc;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (key.empty()) fail(origin, "override '" + spec + "' has an empty path segment");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        if (!node->contains(key)) (*node)[key] = json::object();
        node = &(*node)[key];
        if (!node->is_object()) {
            fail(origin, "override '" + spec + "': '" + key + "' is not an object");
        }
        pos = dot + 1;
    }
}

} // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SweepConfig parse_config_with_overrides(const std::string& json_text,
                                        std::span<const std::string> overrides,
                                        const std::string& mode_override,
                                        const std::string& origin) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& err) {
        fail(origin, "parse error at line " + std::to_string(line_of_byte(json_text, err.byte)) +
                         ": " + err.what());
    }
    if (!doc.is_object()) fail(origin, "top level must be a JSON object");
    for (const auto& ov : overrides) {
        apply_override(doc, ov, origin);
    }
    if (!mode_override.empty()) {
        doc["mode"] = mode_override;
    }
    return from_json(doc, origin);
}

SweepConfig parse_config(const std::string& json_text, const std::string& origin) {
    return parse_config_with_overrides(json_text, {}, {}, origin);
}

SweepConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_text_file(path), path.string());
}

} // namespace dickeflow::sweep

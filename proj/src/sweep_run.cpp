#include "dickeflow/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <mutex>
#include <ostream>
#include <thread>
#include <variant>

#include "dickeflow/errors.hpp"
#include "dickeflow/thermolimit.hpp"

namespace dickeflow::sweep {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

struct Value {
    std::variant<double, long long, bool, std::string> v;

    static Value num(double x) { return {x}; }
    static Value integer(long long x) { return {x}; }
    static Value flag(bool x) { return {x}; }
    static Value text(std::string x) { return {std::move(x)}; }
};

using Row = std::vector<Value>;

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

void write_csv_row(std::ostream& os, const Row& row) {
    bool first = true;
    for (const auto& cell : row) {
        if (!first) os << ',';
        first = false;
        if (const auto* d = std::get_if<double>(&cell.v)) {
            os << format_double(*d);
        } else if (const auto* i = std::get_if<long long>(&cell.v)) {
            os << *i;
        } else if (const auto* b = std::get_if<bool>(&cell.v)) {
            os << (*b ? 1 : 0);
        } else {
            os << csv_escape(std::get<std::string>(cell.v));
        }
    }
    os << '\n';
}

void write_json_row(std::ostream& os, const std::vector<const char*>& columns, const Row& row) {
    os << '{';
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        os << '"' << columns[i] << "\":";
        const auto& cell = row[i];
        if (const auto* d = std::get_if<double>(&cell.v)) {
            os << (std::isfinite(*d) ? format_double(*d) : "null");
        } else if (const auto* iv = std::get_if<long long>(&cell.v)) {
            os << *iv;
        } else if (const auto* b = std::get_if<bool>(&cell.v)) {
            os << (*b ? "true" : "false");
        } else {
            os << json_escape(std::get<std::string>(cell.v));
        }
    }
    os << "}\n";
}

std::vector<const char*> columns_for(Mode mode) {
    switch (mode) {
        case Mode::modes_scan:
            return {"omega_a", "epsilon", "gamma", "lambda", "lambda_plus", "lambda_minus",
                    "stable", "warnings"};
        case Mode::dicke_flow:
            return {"omega_a", "epsilon", "n_qubits", "gamma", "lambda", "n_fock",
                    "alpha_q", "alpha_r", "omega_c_q", "omega_c_r", "t_q", "t_r",
                    "j_q", "j_r", "residual", "tail_mass", "mean_photon", "mean_excitation",
                    "warnings"};
        case Mode::oscillator_flow:
            return {"omega_a", "epsilon", "gamma", "lambda", "n_fock", "n_fock_b",
                    "alpha_q", "alpha_r", "omega_c_q", "omega_c_r", "t_q", "t_r",
                    "j_q", "j_r", "residual", "tail_mass", "mean_photon", "mean_excitation",
                    "warnings"};
        case Mode::analytic_flow:
            return {"omega_a", "epsilon", "gamma", "lambda",
                    "alpha_q", "alpha_r", "omega_c_q", "omega_c_r", "t_q", "t_r",
                    "freq_high", "freq_low", "angle", "beta_eff_high", "beta_eff_low",
                    "occ_high", "occ_low", "j_q", "warnings"};
        case Mode::rectification:
            return {"omega_a", "epsilon", "n_qubits", "gamma", "lambda", "n_fock",
                    "alpha_q", "alpha_r", "omega_c_q", "omega_c_r", "t0", "delta_t",
                    "j_forward", "j_backward", "factor", "degenerate", "warnings"};
        case Mode::rect_max:
            return {"omega_a", "epsilon", "n_qubits", "gamma", "lambda", "n_fock",
                    "alpha_q", "alpha_r", "omega_c_q", "omega_c_r", "t0",
                    "factor_max", "argmax_delta_t", "warnings"};
    }
    return {};
}

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::string join_warnings(const std::vector<std::string>& warnings) {
    std::string out;
    for (const auto& w : warnings) {
        if (!out.empty()) out += "; ";
        out += w;
    }
    return out;
}

// One grid cell: a (n_qubits, gamma, lambda) tuple. Rectification cells fan
// out into one row per delta_t so the dressing is shared.
struct Cell {
    int n_qubits;
    double gamma;
    double lambda;
};

struct CellOutput {
    std::vector<Row> rows;
    int error_rows = 0;
    int warning_rows = 0;
};

class Runner {
public:
    explicit Runner(const SweepConfig& cfg) : cfg_(cfg) {
        const bool qubit_axis =
            cfg.mode == Mode::dicke_flow || cfg.mode == Mode::rectification ||
            cfg.mode == Mode::rect_max;
        const auto& nqs = qubit_axis ? cfg.qubit_counts : std::vector<int>{cfg.model.n_qubits};
        for (int nq : nqs) {
            for (double g : cfg.gammas) {
                for (double l : cfg.lambdas) {
                    cells_.push_back({nq, g, l});
                }
            }
        }
    }

    SweepSummary run(std::ostream& out) {
        const auto columns = columns_for(cfg_.mode);
        if (cfg_.format == OutputFormat::csv) {
            for (std::size_t i = 0; i < columns.size(); ++i) {
                if (i) out << ',';
                out << columns[i];
            }
            out << '\n';
        }

        const int n_cells = static_cast<int>(cells_.size());
        std::vector<std::optional<CellOutput>> results(n_cells);
        std::atomic<int> next{0};
        std::mutex mtx;
        std::condition_variable ready;

        const int n_threads = std::max(1, std::min(cfg_.threads, n_cells));
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                int i;
                while ((i = next.fetch_add(1)) < n_cells) {
                    CellOutput cell = compute(cells_[i]);
                    {
                        std::lock_guard lock(mtx);
                        results[i] = std::move(cell);
                    }
                    ready.notify_one();
                }
            });
        }

        // Emit completed rows in declared order as soon as the prefix is done.
        SweepSummary summary;
        for (int emit = 0; emit < n_cells; ++emit) {
            std::unique_lock lock(mtx);
            ready.wait(lock, [&] { return results[emit].has_value(); });
            CellOutput cell = std::move(*results[emit]);
            results[emit].reset();
            lock.unlock();

            for (const auto& row : cell.rows) {
                if (cfg_.format == OutputFormat::csv) {
                    write_csv_row(out, row);
                } else {
                    write_json_row(out, columns, row);
                }
            }
            if (!out) {
                for (auto& th : pool) th.join();
                throw IoError("write failure while emitting sweep rows");
            }
            summary.rows += static_cast<long long>(cell.rows.size());
            summary.error_rows += cell.error_rows;
            summary.warning_rows += cell.warning_rows;
        }
        for (auto& th : pool) th.join();
        out.flush();
        return summary;
    }

private:
    spectra::SystemParams point_params(const Cell& c) const {
        spectra::SystemParams p = cfg_.model;
        p.n_qubits = c.n_qubits;
        p.gamma = c.gamma;
        p.lambda = c.lambda;
        return p;
    }

    CellOutput compute(const Cell& c) const {
        switch (cfg_.mode) {
            case Mode::modes_scan: return compute_modes(c);
            case Mode::dicke_flow: return compute_flow(c, /*oscillator=*/false);
            case Mode::oscillator_flow: return compute_flow(c, /*oscillator=*/true);
            case Mode::analytic_flow: return compute_analytic(c);
            case Mode::rectification: return compute_rect(c);
            case Mode::rect_max: return compute_rect_max(c);
        }
        return {};
    }

    CellOutput compute_modes(const Cell& c) const {
        const auto p = point_params(c);
        CellOutput out;
        Row row{Value::num(p.omega_a), Value::num(p.epsilon), Value::num(p.gamma),
                Value::num(p.lambda)};
        const auto modes = spectra::dynamical_eigenmodes(p);
        row.push_back(Value::num(modes.lambda_plus));
        row.push_back(Value::num(modes.lambda_minus));
        row.push_back(Value::flag(modes.stable));
        row.push_back(Value::text(""));
        out.rows.push_back(std::move(row));
        return out;
    }

    Row flow_prefix(const spectra::SystemParams& p, bool oscillator) const {
        Row row{Value::num(p.omega_a), Value::num(p.epsilon)};
        if (!oscillator) row.push_back(Value::integer(p.n_qubits));
        row.push_back(Value::num(p.gamma));
        row.push_back(Value::num(p.lambda));
        row.push_back(Value::integer(p.n_fock));
        if (oscillator) row.push_back(Value::integer(p.n_fock_b));
        row.push_back(Value::num(cfg_.res_q.alpha));
        row.push_back(Value::num(cfg_.res_r.alpha));
        row.push_back(Value::num(cfg_.res_q.omega_c));
        row.push_back(Value::num(cfg_.res_r.omega_c));
        row.push_back(Value::num(cfg_.res_q.temperature));
        row.push_back(Value::num(cfg_.res_r.temperature));
        return row;
    }

    CellOutput compute_flow(const Cell& c, bool oscillator) const {
        const auto p = point_params(c);
        CellOutput out;
        Row row = flow_prefix(p, oscillator);
        try {
            const auto flow = oscillator ? dme::solve_oscillator_flow(p, cfg_.res_q, cfg_.res_r)
                                         : dme::solve_dicke_flow(p, cfg_.res_q, cfg_.res_r);
            row.push_back(Value::num(flow.current_q));
            row.push_back(Value::num(flow.current_r));
            row.push_back(Value::num(flow.residual));
            row.push_back(Value::num(flow.tail_mass));
            row.push_back(Value::num(flow.mean_photon));
            row.push_back(Value::num(flow.mean_spin_excitation));
            row.push_back(Value::text(join_warnings(flow.warnings)));
            if (!flow.warnings.empty()) ++out.warning_rows;
        } catch (const std::exception& err) {
            for (int i = 0; i < 6; ++i) row.push_back(Value::num(nan_v));
            row.push_back(Value::text(std::string("error: ") + err.what()));
            ++out.error_rows;
        }
        out.rows.push_back(std::move(row));
        return out;
    }

    CellOutput compute_analytic(const Cell& c) const {
        const auto p = point_params(c);
        CellOutput out;
        Row row{Value::num(p.omega_a), Value::num(p.epsilon), Value::num(p.gamma),
                Value::num(p.lambda), Value::num(cfg_.res_q.alpha), Value::num(cfg_.res_r.alpha),
                Value::num(cfg_.res_q.omega_c), Value::num(cfg_.res_r.omega_c),
                Value::num(cfg_.res_q.temperature), Value::num(cfg_.res_r.temperature)};
        try {
            const auto modes = p.gamma == 0.0 ? limit::limit_modes_gamma0(p)
                                              : limit::limit_modes_gamma1(p);
            const auto eff = limit::effective_temperatures(modes, cfg_.res_q, cfg_.res_r);
            const double j = p.gamma == 0.0
                                 ? limit::analytic_current_gamma0(p, cfg_.res_q, cfg_.res_r)
                                 : limit::analytic_current_gamma1(p, cfg_.res_q, cfg_.res_r);
            row.push_back(Value::num(modes.freq_high));
            row.push_back(Value::num(modes.freq_low));
            row.push_back(Value::num(modes.angle));
            row.push_back(Value::num(eff.beta_eff_high));
            row.push_back(Value::num(eff.beta_eff_low));
            row.push_back(Value::num(eff.occ_high));
            row.push_back(Value::num(eff.occ_low));
            row.push_back(Value::num(j));
            row.push_back(Value::text(""));
        } catch (const std::exception& err) {
            for (int i = 0; i < 8; ++i) row.push_back(Value::num(nan_v));
            row.push_back(Value::text(std::string("error: ") + err.what()));
            ++out.error_rows;
        }
        out.rows.push_back(std::move(row));
        return out;
    }

    Row rect_prefix(const spectra::SystemParams& p) const {
        return Row{Value::num(p.omega_a),        Value::num(p.epsilon),
                   Value::integer(p.n_qubits),   Value::num(p.gamma),
                   Value::num(p.lambda),         Value::integer(p.n_fock),
                   Value::num(cfg_.res_q.alpha), Value::num(cfg_.res_r.alpha),
                   Value::num(cfg_.res_q.omega_c), Value::num(cfg_.res_r.omega_c),
                   Value::num(cfg_.t0)};
    }

    CellOutput compute_rect(const Cell& c) const {
        const auto p = point_params(c);
        CellOutput out;
        try {
            const auto ds = dme::dress_dicke(p);
            for (double dt : cfg_.delta_ts) {
                Row row = rect_prefix(p);
                row.push_back(Value::num(dt));
                const auto r = rect::rectification_factor(ds, rect::BiasSpec{cfg_.t0, dt},
                                                          cfg_.res_q, cfg_.res_r);
                row.push_back(Value::num(r.forward));
                row.push_back(Value::num(r.backward));
                row.push_back(Value::num(r.factor));
                row.push_back(Value::flag(r.degenerate));
                row.push_back(Value::text(""));
                out.rows.push_back(std::move(row));
            }
        } catch (const std::exception& err) {
            out.rows.clear();
            for (double dt : cfg_.delta_ts) {
                Row row = rect_prefix(p);
                row.push_back(Value::num(dt));
                for (int i = 0; i < 3; ++i) row.push_back(Value::num(nan_v));
                row.push_back(Value::flag(false));
                row.push_back(Value::text(std::string("error: ") + err.what()));
                out.rows.push_back(std::move(row));
                ++out.error_rows;
            }
        }
        return out;
    }

    CellOutput compute_rect_max(const Cell& c) const {
        const auto p = point_params(c);
        CellOutput out;
        Row row = rect_prefix(p);
        try {
            const auto ds = dme::dress_dicke(p);
            const auto best =
                rect::max_rectification(ds, cfg_.t0, cfg_.delta_ts, cfg_.res_q, cfg_.res_r);
            row.push_back(Value::num(best.factor_max));
            row.push_back(Value::num(best.argmax_delta_t));
            row.push_back(Value::text(""));
        } catch (const std::exception& err) {
            row.push_back(Value::num(nan_v));
            row.push_back(Value::num(nan_v));
            row.push_back(Value::text(std::string("error: ") + err.what()));
            ++out.error_rows;
        }
        out.rows.push_back(std::move(row));
        return out;
    }

    const SweepConfig& cfg_;
    std::vector<Cell> cells_;
};

} // namespace

SweepSummary run_sweep(const SweepConfig& config, std::ostream& out) {
    Runner runner(config);
    return runner.run(out);
}

SweepSummary run_sweep_to_file(const SweepConfig& config) {
    if (config.output_path.empty()) {
        return run_sweep(config, std::cout);
    }
    std::ofstream out(config.output_path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open output file " + config.output_path);
    }
    auto summary = run_sweep(config, out);
    out.close();
    if (!out) {
        throw IoError("write failure on " + config.output_path);
    }
    return summary;
}

ConvergenceReport convergence_report(const SweepConfig& config) {
    if (config.mode != Mode::dicke_flow && config.mode != Mode::oscillator_flow) {
        throw ConfigError("convergence_report: applies to dicke-flow and oscillator-flow modes");
    }
    if (!config.convergence_check) {
        throw ConfigError("convergence_report: config must set convergence_check = true");
    }
    const bool oscillator = config.mode == Mode::oscillator_flow;

    ConvergenceReport report;
    bool found = false;
    int skipped_cells = 0;

    const auto& nqs = oscillator ? std::vector<int>{config.model.n_qubits} : config.qubit_counts;
    for (int nq : nqs) {
        for (double g : config.gammas) {
            for (double l : config.lambdas) {
                spectra::SystemParams p = config.model;
                p.n_qubits = nq;
                p.gamma = g;
                p.lambda = l;
                try {
                    const auto flow = oscillator
                                          ? dme::solve_oscillator_flow(p, config.res_q, config.res_r)
                                          : dme::solve_dicke_flow(p, config.res_q, config.res_r);
                    if (!found || flow.tail_mass > report.worst_tail) {
                        report.worst_tail = flow.tail_mass;
                        report.worst_point = p;
                        found = true;
                    }
                } catch (const InstabilityError&) {
                    ++skipped_cells;  // unstable points have no flow to converge
                }
            }
        }
    }
    if (!found) {
        report.skipped = true;
        report.notice = "no solvable grid point (all cells unstable or failed); nothing to converge";
        return report;
    }
    if (skipped_cells > 0) {
        report.notice =
            std::to_string(skipped_cells) + " unstable grid point(s) skipped during the scan";
    }

    for (int extra : {0, 5, 10}) {
        spectra::SystemParams p = report.worst_point;
        p.n_fock = report.worst_point.n_fock + extra;
        if (oscillator) p.n_fock_b = report.worst_point.n_fock_b + extra;
        const auto flow = oscillator ? dme::solve_oscillator_flow(p, config.res_q, config.res_r)
                                     : dme::solve_dicke_flow(p, config.res_q, config.res_r);
        report.rows.push_back({p.n_fock, flow.current_q});
    }

    const double j0 = report.rows.front().j_q;
    const double j1 = report.rows.back().j_q;
    bool all_below_floor = true;
    for (const auto& row : report.rows) {
        if (std::abs(row.j_q) >= rect::flow_floor) all_below_floor = false;
    }
    report.drift = all_below_floor ? 0.0
                                   : std::abs(j1 - j0) / std::max(std::abs(j0), rect::flow_floor);
    report.passed = report.drift < 1e-3;
    return report;
}

} // namespace dickeflow::sweep

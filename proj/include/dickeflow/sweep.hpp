// sweep.hpp - configuration ingestion, sweep orchestration, tabular output
//
// Row order is the Cartesian product of the declared axes in lexicographic
// order (n_qubits, gamma, lambda, delta_t), independent of the thread count.
// CSV fields use shortest round-trip decimals (<= 17 significant digits),
// UTF-8, LF line endings.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dickeflow/dissipation.hpp"
#include "dickeflow/rectify.hpp"

namespace dickeflow::sweep {

inline constexpr int schema_version = 1;

enum class Mode {
    dicke_flow,
    oscillator_flow,
    analytic_flow,
    rectification,
    rect_max,
    modes_scan,
};
const char* to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view name);

enum class OutputFormat { csv, json_lines };

struct SweepConfig {
    Mode mode = Mode::dicke_flow;
    spectra::SystemParams model;
    dme::ReservoirParams res_q{dme::Bath::q, 1e-3, 20.0, 0.6};
    dme::ReservoirParams res_r{dme::Bath::r, 1e-3, 20.0, 1.2};
    std::vector<double> lambdas;
    std::vector<double> gammas;
    std::vector<int> qubit_counts;
    std::vector<double> delta_ts;  // rectification modes only
    double t0 = 1.0;
    std::string output_path;  // empty = stdout
    OutputFormat format = OutputFormat::csv;
    int threads = 1;
    bool convergence_check = false;
};

// Parse + validate a config document. Defaults: omega_a=1, epsilon=0.8,
// omega_c=20, alpha_q=alpha_r=0.001, n_fock=30, T_q=0.6, T_r=1.2; sweep axes
// default to singletons taken from the model block. Throws ConfigError with
// the offending line/field.
SweepConfig load_config(const std::filesystem::path& path);
SweepConfig parse_config(const std::string& json_text, const std::string& origin = "<config>");

// Same, applying "dot.path=value" overrides before validation; an empty
// mode_override keeps the document's mode.
SweepConfig parse_config_with_overrides(const std::string& json_text,
                                        std::span<const std::string> overrides,
                                        const std::string& mode_override = {},
                                        const std::string& origin = "<config>");
std::string read_text_file(const std::filesystem::path& path);

struct SweepSummary {
    long long rows = 0;
    long long error_rows = 0;
    long long warning_rows = 0;
};

// Evaluate the configured grid and stream records in deterministic order.
// Hard per-row solver errors become error rows (the run continues).
SweepSummary run_sweep(const SweepConfig& config, std::ostream& out);
// Honors config.output_path (stdout when empty); throws IoError when the
// target cannot be opened or written.
SweepSummary run_sweep_to_file(const SweepConfig& config);

struct ConvergenceRow {
    int n_fock = 0;
    double j_q = 0.0;
};

struct ConvergenceReport {
    bool skipped = false;     // no solvable grid point (e.g. all unstable)
    std::string notice;
    spectra::SystemParams worst_point;
    double worst_tail = 0.0;
    std::vector<ConvergenceRow> rows;
    double drift = 0.0;       // |J(last) - J(first)| / max(|J(first)|, 1e-15)
    bool passed = false;      // drift < 1e-3
};

// Re-evaluate the sweep's worst-truncation-diagnostic point at n_fock (and,
// for the oscillator model, n_fock_b) raised by {0, 5, 10}. Flows below the
// rectification flow floor at every truncation report drift 0.
ConvergenceReport convergence_report(const SweepConfig& config);

// Shortest decimal that round-trips, capped at 17 significant digits.
std::string format_double(double x);

} // namespace dickeflow::sweep

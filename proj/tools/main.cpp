// dickeflow CLI: steady-state heat transport sweeps over the anisotropic
// Dicke model and its two-oscillator limit.
//
// Exit codes: 0 ok, 1 I/O failure, 2 config error, 3 solver error during sweep.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "dickeflow/errors.hpp"
#include "dickeflow/sweep.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string output_path;
    int threads = 0;  // 0 = unset
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON sweep configuration")->required();
    cmd->add_option("--output", args.output_path, "output path (overrides config; stdout if empty)");
    cmd->add_option("--threads", args.threads, "worker threads (default: DICKEFLOW_THREADS or 1)");
    cmd->add_option("--override", args.overrides,
                    "config override as dot.path=value (repeatable)");
}

int default_threads() {
    if (const char* env = std::getenv("DICKEFLOW_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 0;
}

dickeflow::sweep::SweepConfig load(const CommonArgs& args, const std::string& mode) {
    using namespace dickeflow::sweep;
    auto cfg = parse_config_with_overrides(read_text_file(args.config_path), args.overrides, mode,
                                           args.config_path);
    if (!args.output_path.empty()) cfg.output_path = args.output_path;
    if (args.threads >= 1) {
        cfg.threads = args.threads;
    } else if (const int env_threads = default_threads(); env_threads >= 1) {
        cfg.threads = env_threads;
    }
    return cfg;
}

int run_mode(const CommonArgs& args, const std::string& mode) {
    const auto cfg = load(args, mode);
    const auto summary = dickeflow::sweep::run_sweep_to_file(cfg);
    std::cerr << "rows=" << summary.rows << " errors=" << summary.error_rows
              << " warnings=" << summary.warning_rows;
    if (!cfg.output_path.empty()) std::cerr << " -> " << cfg.output_path;
    std::cerr << "\n";
    return summary.error_rows > 0 ? 3 : 0;
}

int run_check(const CommonArgs& args) {
    auto cfg = load(args, "");
    cfg.convergence_check = true;  // the subcommand is the explicit request
    const auto report = dickeflow::sweep::convergence_report(cfg);
    using dickeflow::sweep::format_double;
    if (report.skipped) {
        std::cout << "convergence check skipped: " << report.notice << "\n";
        return 0;
    }
    if (!report.notice.empty()) std::cout << "note: " << report.notice << "\n";
    const auto& p = report.worst_point;
    std::cout << "worst diagnostic point: n_qubits=" << p.n_qubits << " gamma=" << format_double(p.gamma)
              << " lambda=" << format_double(p.lambda)
              << " (tail_mass=" << format_double(report.worst_tail) << ")\n";
    std::cout << "n_fock  j_q\n";
    for (const auto& row : report.rows) {
        std::cout << row.n_fock << "      " << format_double(row.j_q) << "\n";
    }
    std::cout << "relative drift: " << format_double(report.drift) << " => "
              << (report.passed ? "PASS" : "FAIL") << " (threshold 1e-03)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady-state heat currents and thermal rectification in the anisotropic Dicke model"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* mode;  // empty for check
        const char* help;
    };
    const Sub subs[] = {
        {"flow", "dicke-flow", "finite-size Dicke heat-flow sweep"},
        {"osc-flow", "oscillator-flow", "two-coupled-oscillator heat-flow sweep"},
        {"analytic", "analytic-flow", "closed-form limit currents (gamma = 0 or 1)"},
        {"rect", "rectification", "rectification factor over the bias grid"},
        {"rect-max", "rect-max", "maximum rectification over temperature bias"},
        {"modes", "modes-scan", "dynamical eigenmode scan with stability flags"},
        {"check", "", "truncation convergence report for the configured sweep"},
    };

    std::vector<CommonArgs> args(std::size(subs));
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        auto* cmd = app.add_subcommand(subs[i].name, subs[i].help);
        add_common(cmd, args[i]);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (std::size_t i = 0; i < std::size(subs); ++i) {
            if (app.get_subcommand(subs[i].name)->parsed()) {
                // check keeps the mode declared in the config file
                if (subs[i].mode[0] == '\0') return run_check(args[i]);
                return run_mode(args[i], subs[i].mode);
            }
        }
    } catch (const dickeflow::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const dickeflow::IoError& err) {
        std::cerr << "io error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
    return 0;
}

// Command-line front end: analyze a scenario without simulating it, simulate
// one and emit the trajectory CSV plus an outcome report, reconcile the
// simulated outcome against the static prediction, and list or emit the
// built-in scenarios.
//
// Exit codes: 0 success / comparison passed, 1 usage or internal error,
// 2 scenario validation failure, 3 divergence guard, 4 run not settled,
// 5 comparison failed.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "opinionet/analysis.hpp"
#include "opinionet/report.hpp"
#include "opinionet/scenario.hpp"
#include "opinionet/sim.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitNotSettled = 4;
constexpr int kExitMismatch = 5;

struct SimulateOverrides {
    std::optional<double> step;
    std::optional<double> horizon;
    std::optional<double> cluster_tolerance;
    std::optional<std::string> smoothing;
    std::optional<double> sigmoid_gain;
    std::optional<int> stride;
};

opinionet::Scenario load(const std::string& path_or_builtin) {
    namespace fs = std::filesystem;
    const auto& names = opinionet::builtin_scenario_names();
    if (!fs::exists(path_or_builtin) &&
        std::find(names.begin(), names.end(), path_or_builtin) != names.end()) {
        return opinionet::builtin_scenario(path_or_builtin);
    }
    return opinionet::load_scenario(path_or_builtin);
}

void apply(const SimulateOverrides& ov, opinionet::Scenario& scenario) {
    if (ov.step) scenario.solver.step = *ov.step;
    if (ov.horizon) scenario.solver.horizon = *ov.horizon;
    if (ov.cluster_tolerance) scenario.solver.cluster_tolerance = *ov.cluster_tolerance;
    if (ov.sigmoid_gain) scenario.feedback.sigmoid_gain = *ov.sigmoid_gain;
    if (ov.stride) scenario.output_stride = *ov.stride;
    if (ov.smoothing) {
        if (*ov.smoothing == "exact") {
            scenario.feedback.smoothing = opinionet::SignSmoothing::Exact;
        } else if (*ov.smoothing == "sigmoid") {
            scenario.feedback.smoothing = opinionet::SignSmoothing::Sigmoid;
        } else if (*ov.smoothing == "signum") {
            scenario.feedback.smoothing = opinionet::SignSmoothing::Signum;
        } else {
            throw CLI::ValidationError("--smoothing must be exact, sigmoid, or signum");
        }
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

int run_analyze(const std::string& input, const std::string& out_path) {
    const opinionet::Scenario scenario = load(input);
    const opinionet::AnalysisReport report =
        opinionet::predict(scenario.topology, scenario.coupling);
    const std::string text = opinionet::render_analysis(report, scenario);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_file(out_path, text);
    }
    return 0;
}

// Runs one scenario and writes its CSV and outcome report into out_dir (or
// the working directory). Console output goes through `console` so that
// concurrent runs can defer printing. Returns the process exit code.
int run_simulate(opinionet::Scenario scenario, const std::string& out_dir,
                 std::string& console) {
    namespace fs = std::filesystem;
    const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);

    opinionet::Trajectory trajectory;
    try {
        trajectory = opinionet::integrate(scenario.topology, scenario.coupling,
                                          scenario.feedback, scenario.initial_state(),
                                          scenario.solver);
    } catch (const opinionet::SimulationDiverged& e) {
        console += scenario.name + ": " + e.what() + "\n";
        return kExitDiverged;
    }

    const opinionet::SimOutcome outcome = opinionet::detect_clusters(
        trajectory, scenario.solver.cluster_tolerance, scenario.solver.steady_tolerance);

    std::ostringstream csv;
    opinionet::write_trajectory_csv(csv, trajectory, scenario.output_stride);
    write_file(dir / (scenario.name + "_trajectory.csv"), csv.str());
    write_file(dir / (scenario.name + "_outcome.txt"),
               opinionet::render_outcome(outcome, scenario));

    console += opinionet::render_outcome(outcome, scenario);
    if (!outcome.settled) {
        console += scenario.name + ": not settled at t = " +
                   std::to_string(trajectory.final_time()) + "; extend the horizon\n";
        return kExitNotSettled;
    }
    return 0;
}

int run_compare(const std::string& input) {
    const opinionet::Scenario scenario = load(input);
    const opinionet::AnalysisReport report =
        opinionet::predict(scenario.topology, scenario.coupling);

    opinionet::Trajectory trajectory;
    try {
        trajectory = opinionet::integrate(scenario.topology, scenario.coupling,
                                          scenario.feedback, scenario.initial_state(),
                                          scenario.solver);
    } catch (const opinionet::SimulationDiverged& e) {
        std::cerr << scenario.name << ": " << e.what() << "\n";
        return kExitDiverged;
    }

    const opinionet::SimOutcome outcome = opinionet::detect_clusters(
        trajectory, scenario.solver.cluster_tolerance, scenario.solver.steady_tolerance);
    const opinionet::Reconciliation rec = opinionet::compare(report, outcome);

    std::cout << opinionet::render_reconciliation(rec, report, scenario);
    return rec.status == opinionet::MatchStatus::Fail ? kExitMismatch : 0;
}

int run_scenarios(const std::string& emit_dir) {
    namespace fs = std::filesystem;
    for (const std::string& name : opinionet::builtin_scenario_names()) {
        std::cout << name << ": " << opinionet::builtin_scenario_description(name) << "\n";
    }
    if (!emit_dir.empty()) {
        const fs::path dir(emit_dir);
        fs::create_directories(dir);
        for (const std::string& name : opinionet::builtin_scenario_names()) {
            write_file(dir / (name + ".scn"),
                       opinionet::scenario_to_string(opinionet::builtin_scenario(name)));
        }
        std::cout << "wrote " << opinionet::builtin_scenario_names().size()
                  << " scenario files to " << dir.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "opinionet - simulation and static analysis of matrix-weighted opinion "
        "dynamics over interdependent topics"};
    app.require_subcommand(1);
    // -h stays free for the simulate --h step option.
    app.set_help_flag("--help", "print help");

    std::string input;
    std::string out_path;
    std::string out_dir;
    std::string emit_dir;
    SimulateOverrides overrides;
    bool simulate_all = false;

    CLI::App* analyze = app.add_subcommand("analyze", "predict the outcome without simulating");
    analyze->add_option("scenario", input, "scenario file or built-in name")->required();
    analyze->add_option("--out", out_path, "write the report to a file instead of stdout");

    CLI::App* simulate =
        app.add_subcommand("simulate", "integrate the dynamics and detect clusters");
    simulate->set_help_flag("--help", "print help");
    simulate->add_option("scenario", input, "scenario file or built-in name");
    simulate->add_flag("--all", simulate_all, "run every built-in scenario");
    simulate->add_option("--h", overrides.step, "integration step");
    simulate->add_option("--tf", overrides.horizon, "integration horizon");
    simulate->add_option("--tol", overrides.cluster_tolerance, "cluster tolerance");
    simulate->add_option("--smoothing", overrides.smoothing, "exact | sigmoid | signum");
    simulate->add_option("--ke", overrides.sigmoid_gain, "sigmoid slope");
    simulate->add_option("--stride", overrides.stride, "CSV output stride");
    simulate->add_option("--out", out_dir, "output directory (default: current)");

    CLI::App* compare_cmd =
        app.add_subcommand("compare", "reconcile the simulated outcome with the prediction");
    compare_cmd->add_option("scenario", input, "scenario file or built-in name")->required();

    CLI::App* scenarios = app.add_subcommand("scenarios", "list built-in scenarios");
    scenarios->add_option("--emit", emit_dir, "write the built-in scenario files here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return run_analyze(input, out_path);
        if (simulate->parsed()) {
            if (simulate_all) {
                // One worker per built-in; each writes its own files, console
                // output is printed in listing order after the join.
                const auto& names = opinionet::builtin_scenario_names();
                std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
                std::vector<std::thread> workers;
                std::vector<int> codes(names.size(), 0);
                std::vector<std::string> consoles(names.size());
                for (std::size_t i = 0; i < names.size(); ++i) {
                    workers.emplace_back([&, i] {
                        try {
                            opinionet::Scenario s = opinionet::builtin_scenario(names[i]);
                            apply(overrides, s);
                            codes[i] = run_simulate(std::move(s), out_dir, consoles[i]);
                        } catch (const std::exception& e) {
                            consoles[i] = names[i] + std::string(": error: ") + e.what() + "\n";
                            codes[i] = 1;
                        }
                    });
                }
                for (auto& w : workers) w.join();
                int exit_code = 0;
                for (std::size_t i = 0; i < names.size(); ++i) {
                    std::cout << consoles[i] << "\n";
                    if (codes[i] != 0 && exit_code == 0) exit_code = codes[i];
                }
                return exit_code;
            }
            if (input.empty()) {
                std::cerr << "simulate needs a scenario file or --all\n";
                return 1;
            }
            opinionet::Scenario s = load(input);
            apply(overrides, s);
            std::string console;
            const int code = run_simulate(std::move(s), out_dir, console);
            std::cout << console;
            return code;
        }
        if (compare_cmd->parsed()) return run_compare(input);
        if (scenarios->parsed()) return run_scenarios(emit_dir);
    } catch (const opinionet::ScenarioError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

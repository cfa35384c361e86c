#pragma once

// Scenario ingestion and emission. A scenario bundles everything one run
// needs: the topology, per-edge coupling matrices, feedback configuration,
// initial opinions, and solver settings. Scenarios live in a line-oriented
// text format (see docs/scenario_format.md); a handful of built-in scenarios
// covering the characteristic coupling structures ship with the tool.

#include <Eigen/Dense>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "opinionet/core.hpp"
#include "opinionet/sim.hpp"

namespace opinionet {

struct Scenario {
    std::string name;
    Topology topology;
    CouplingSpec coupling;
    FeedbackConfig feedback;
    Eigen::MatrixXd initial_opinions;  ///< agent_count x topic_count
    SolverSettings solver;
    int output_stride = 100;

    [[nodiscard]] OpinionState initial_state() const;
};

/// Carries every parse or validation issue of a scenario file, each with a
/// line reference where one applies.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> issues);

    std::vector<std::string> issues;
};

/// Parses a scenario document. Collects all issues (unknown keys, malformed
/// numbers, dimension mismatches, coupling symmetry violations, negative
/// gains, missing opinions) and throws ScenarioError listing them.
Scenario parse_scenario(std::istream& in, const std::string& source_name);

Scenario load_scenario(const std::string& path);

void write_scenario(const Scenario& scenario, std::ostream& out);
std::string scenario_to_string(const Scenario& scenario);

/// Names of the built-in scenarios, in listing order.
const std::vector<std::string>& builtin_scenario_names();

/// One-line description of a built-in.
std::string builtin_scenario_description(const std::string& name);

/// Builds a built-in by name; throws std::invalid_argument for unknown names.
Scenario builtin_scenario(const std::string& name);

}  // namespace opinionet

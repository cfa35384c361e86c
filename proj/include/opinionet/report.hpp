#pragma once

// Deterministic text rendering of analysis reports, simulation outcomes, and
// reconciliations, plus the trajectory CSV writer. All output is plain
// structured text so external plotting and diffing stay easy.

#include <iosfwd>
#include <string>

#include "opinionet/analysis.hpp"
#include "opinionet/scenario.hpp"
#include "opinionet/sim.hpp"

namespace opinionet {

std::string render_analysis(const AnalysisReport& report, const Scenario& scenario);

std::string render_outcome(const SimOutcome& outcome, const Scenario& scenario);

std::string render_reconciliation(const Reconciliation& reconciliation,
                                  const AnalysisReport& report, const Scenario& scenario);

/// Writes the trajectory as CSV with header `t,agent,topic,value` and one
/// row per (time, agent, topic). Steps are sampled every `stride` steps; the
/// final step is always included. Agents and topics are 1-based.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, int stride);

}  // namespace opinionet

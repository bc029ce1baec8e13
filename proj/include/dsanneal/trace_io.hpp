#pragma once

#include "dsanneal/annealing.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace dsanneal {

/// One row per agent per recorded iteration:
///   k,agent,x,v,s,xbar,consensus_err,social_cost
/// consensus_err is |s_i - xbar| (unweighted). Vector-valued columns (d > 1)
/// join their components with ';'. Numbers use 17 significant digits.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

/// Sidecar metadata: full config, seeds, method, fingerprint, record count.
nlohmann::json trace_metadata(const RunTrace& trace, const ExperimentConfig& cfg);

/// Formats a double with enough digits to round-trip.
std::string format_number(double v);

}  // namespace dsanneal

#pragma once

#include "nod/bench/config.hpp"
#include "nod/ode_flow.hpp"
#include "nod/solvers.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace nod::bench {

/// %.17g, the shortest format that round-trips every double.
std::string format_double(double v);

/// Trace CSV: '#' header comments, then k,residual,dist_sq,psi,psi_ratio,contraction_ok
/// with empty fields where a value is undefined, then a '# stop:' footer.
void write_trace_csv(std::ostream& os, const SolverTrace& trace, const RunConfig& config);

/// Flow CSV with columns t,z0..,v0..,psi.
void write_flow_csv(std::ostream& os, const std::vector<FlowRow>& rows, const std::string& id,
                    double mu, const RunConfig& config);

/// Writes `text` to `path`, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace nod::bench

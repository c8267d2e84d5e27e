#include "nod/bench/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nod::bench {
namespace {

void write_header(std::ostream& os, const std::string& id, const std::string& method,
                  std::optional<double> eta, double mu, const RunConfig& config) {
  os << "# version: " << kVersion << '\n';
  os << "# instance: " << id << '\n';
  os << "# method: " << method << '\n';
  if (eta) {
    os << "# eta: " << format_double(*eta) << '\n';
  }
  os << "# mu: " << format_double(mu) << '\n';
  os << "# seed: " << config.seed << '\n';
}

// Output paths do not change the numbers, so they stay out of the header.
std::string embedded_config(const RunConfig& config) {
  nlohmann::json j = to_json(config);
  j.erase("outputs");
  return j.dump();
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const SolverTrace& trace, const RunConfig& config) {
  const TraceMeta& m = trace.meta;
  write_header(os, m.instance_id, m.method, m.eta, m.mu, config);
  os << "# self_certified: " << (m.self_certified ? "true" : "false") << '\n';
  os << "# config: " << embedded_config(config) << '\n';
  os << "k,residual,dist_sq,psi,psi_ratio,contraction_ok\n";
  for (const TraceRecord& r : trace.records) {
    os << r.k << ',' << format_double(r.residual) << ',' << opt(r.dist_sq) << ',' << opt(r.psi)
       << ',' << opt(r.psi_ratio) << ',';
    if (r.contraction_ok) {
      os << (*r.contraction_ok ? '1' : '0');
    }
    os << '\n';
  }
  os << "# stop: " << to_string(m.stop) << '\n';
}

void write_flow_csv(std::ostream& os, const std::vector<FlowRow>& rows, const std::string& id,
                    double mu, const RunConfig& config) {
  write_header(os, id, "ode_flow", std::nullopt, mu, config);
  os << "# config: " << embedded_config(config) << '\n';
  const Index d = rows.empty() ? 0 : rows.front().state.z.size();
  os << 't';
  for (Index i = 0; i < d; ++i) os << ",z" << i;
  for (Index i = 0; i < d; ++i) os << ",v" << i;
  os << ",psi\n";
  for (const FlowRow& r : rows) {
    os << format_double(r.state.t);
    for (Index i = 0; i < d; ++i) os << ',' << format_double(r.state.z(i));
    for (Index i = 0; i < d; ++i) os << ',' << format_double(r.state.v(i));
    os << ',' << format_double(r.psi) << '\n';
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

}  // namespace nod::bench

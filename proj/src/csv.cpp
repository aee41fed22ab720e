#include "nettax/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace nettax {

std::string format_number(double value) {
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
  os << kTraceHeader << '\n';
  for (const TraceSample& s : trace.samples) {
    os << format_number(s.time) << ',' << format_number(s.load) << ','
       << format_number(s.tau2) << ',' << format_number(s.cost) << ','
       << format_number(s.optimal_cost) << ',' << format_number(s.poa);
    for (int n : s.counts)
      os << ',' << n;
    os << ',' << to_string(s.event) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  os << kSummaryHeader << '\n';
  for (const SweepPoint& p : points) {
    os << format_number(p.load) << ',' << to_string(p.policy) << ','
       << (p.handovers ? "on" : "off") << ',' << format_number(p.mean_poa) << ','
       << format_number(p.se_poa) << ',' << format_number(p.blocking_rate) << ','
       << p.replications << '\n';
  }
}

} // namespace nettax

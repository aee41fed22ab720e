#pragma once

// CSV emission for traces and sweep summaries. Floats use 9 significant
// digits; NaN and infinity are written as "nan" and "inf".

#include "nettax/simulator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nettax {

inline constexpr const char* kTraceHeader =
    "t,D,tau2,C,C_opt,PoA,n1A,n1B,n2A,n2B,event";
inline constexpr const char* kSummaryHeader =
    "load,policy,handover,mean_poa,se_poa,blocking_rate,replications";

std::string format_number(double value);

void write_trace_csv(std::ostream& os, const SimTrace& trace);
void write_summary_csv(std::ostream& os, const std::vector<SweepPoint>& points);

} // namespace nettax

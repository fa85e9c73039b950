#pragma once

#include <iosfwd>

#include "pic/feasibility.hpp"
#include "pic/simulator.hpp"

namespace pic {

/// Numbers are written with 17 significant digits so they read back exactly.
inline constexpr int kCsvPrecision = 17;

/// Header: t,xi_1..xi_n,z_1..z_n,theta_1..theta_n,u_1..u_n,psi_1..psi_n,y_d
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

/// Header: t,kind,stage,value
void write_events_csv(std::ostream& os, const Trajectory& trajectory);

/// Header: x,y,feasible,margin_c1,margin_c2
void write_region_csv(std::ostream& os, const RegionMap& region);

/// Header: family,stage,worst_margin,worst_t,violations,bound
void write_monitor_csv(std::ostream& os, const MonitorReport& report,
                       const Trajectory& trajectory);

}  // namespace pic

#include "pic/csv.hpp"

#include <ostream>
#include <string>

namespace pic {

namespace {

class PrecisionGuard {
 public:
  explicit PrecisionGuard(std::ostream& os)
      : os_(os), precision_(os.precision(kCsvPrecision)), flags_(os.flags()) {
    os_.unsetf(std::ios::floatfield);
  }
  ~PrecisionGuard() {
    os_.precision(precision_);
    os_.flags(flags_);
  }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  std::ostream& os_;
  std::streamsize precision_;
  std::ios::fmtflags flags_;
};

void header_group(std::ostream& os, const char* name, std::size_t n) {
  for (std::size_t i = 1; i <= n; ++i) os << ',' << name << '_' << i;
}

void row_group(std::ostream& os, const std::vector<double>& values) {
  for (double v : values) os << ',' << v;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  PrecisionGuard guard(os);
  const std::size_t n = trajectory.order;
  os << 't';
  header_group(os, "xi", n);
  header_group(os, "z", n);
  header_group(os, "theta", n);
  header_group(os, "u", n);
  header_group(os, "psi", n);
  os << ",y_d\n";
  for (const auto& s : trajectory.samples) {
    os << s.t;
    row_group(os, s.xi);
    row_group(os, s.z);
    row_group(os, s.theta);
    row_group(os, s.u);
    row_group(os, s.psi);
    os << ',' << s.y_d << '\n';
  }
}

void write_events_csv(std::ostream& os, const Trajectory& trajectory) {
  PrecisionGuard guard(os);
  os << "t,kind,stage,value\n";
  for (const auto& e : trajectory.events) {
    os << e.t << ',' << to_string(e.kind) << ',' << e.stage << ',' << e.value
       << '\n';
  }
}

void write_region_csv(std::ostream& os, const RegionMap& region) {
  PrecisionGuard guard(os);
  os << "x,y,feasible,margin_c1,margin_c2\n";
  for (const auto& c : region.cells) {
    os << c.x << ',' << c.y << ',' << (c.feasible ? 1 : 0) << ','
       << c.margin_c1 << ',' << c.margin_c2 << '\n';
  }
}

void write_monitor_csv(std::ostream& os, const MonitorReport& report,
                       const Trajectory& trajectory) {
  PrecisionGuard guard(os);
  os << "family,stage,worst_margin,worst_t,violations,bound\n";
  const auto emit = [&](const char* name, const BoundFamily& f, bool rate) {
    for (std::size_t i = 0; i < f.worst_margin.size(); ++i) {
      os << name << ',' << i + 1 << ',' << f.worst_margin[i] << ','
         << trajectory.samples.at(f.worst_sample[i]).t << ',' << f.violations[i]
         << ',';
      if (rate) os << report.rate_bounds[i];
      os << '\n';
    }
  };
  emit("performance", report.performance, false);
  emit("input", report.input, false);
  emit("state", report.state, false);
  emit("rate", report.rate, true);
}

}  // namespace pic

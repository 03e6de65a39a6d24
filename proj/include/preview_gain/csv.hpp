#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "preview_gain/common.hpp"

namespace preview_gain {

/// Shortest-faithful double formatting; reruns with the same config produce
/// byte-identical output.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 16; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(probe, "%lf", &back);
    if (back == v) return probe;
  }
  return buf;
}

/// CSV emitter whose header carries a config hash rather than timestamps.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void comment(const std::string& line) { os_ << "# " << line << "\n"; }

  void config_hash(const std::string& config) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config)));
    os_ << "# config_hash=" << buf << " " << config << "\n";
  }

  void header(const std::vector<std::string>& cols) { write_row(cols); }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ",";
      os_ << cells[i];
    }
    os_ << "\n";
  }

 private:
  std::ostream& os_;
};

}  // namespace preview_gain

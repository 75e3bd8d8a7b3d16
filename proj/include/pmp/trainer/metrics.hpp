#pragma once

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pmp/common.hpp"

namespace pmp::trainer {

/// One logged scalar: long format so arbitrary metric sets share a file.
struct MetricPoint {
  std::string name;
  long step = 0;
  double value = 0.0;
};

class MetricsLog {
 public:
  void add(std::string name, long step, double value) {
    points_.push_back(MetricPoint{std::move(name), step, value});
  }

  const std::vector<MetricPoint>& points() const { return points_; }
  bool empty() const { return points_.empty(); }

  void write_csv(std::ostream& os) const {
    os << "metric,step,value\n";
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const MetricPoint& p : points_)
      os << p.name << ',' << p.step << ',' << p.value << '\n';
  }

  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write metrics file " + path);
    write_csv(os);
  }

  static MetricsLog read_csv(std::istream& is) {
    MetricsLog log;
    std::string line;
    if (!std::getline(is, line)) throw IoError("metrics file: missing header");
    if (line == "metric,step,value\r") line.pop_back();
    if (line != "metric,step,value") throw IoError("metrics file: unexpected header");
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::size_t c1 = line.find(',');
      const std::size_t c2 = line.find(',', c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos)
        throw IoError("metrics file: malformed row: " + line);
      MetricPoint p;
      p.name = line.substr(0, c1);
      try {
        p.step = std::stol(line.substr(c1 + 1, c2 - c1 - 1));
        p.value = std::stod(line.substr(c2 + 1));
      } catch (const std::exception&) {
        throw IoError("metrics file: malformed row: " + line);
      }
      log.points_.push_back(std::move(p));
    }
    return log;
  }

  static MetricsLog load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open metrics file " + path);
    return read_csv(is);
  }

 private:
  std::vector<MetricPoint> points_;
};

}  // namespace pmp::trainer

#include "lieaut/report.hpp"

#include <sstream>

#ifndef LIEAUT_VERSION
#define LIEAUT_VERSION "0.0.0"
#endif

namespace lieaut {

ojson report_to_json(const VerificationReport& r) {
  ojson j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["heuristic"] = r.heuristic;
  j["samples"] = r.samples;
  j["worst_margin"] = r.worst_margin;
  j["witness"] = r.witness.is_null() ? ojson() : r.witness;
  j["seed"] = r.seed;
  j["wall_time_ms"] = r.wall_time_ms;
  if (!r.values.empty()) j["values"] = r.values;
  return j;
}

bool ReportBundle::overall_pass() const {
  for (const auto& r : reports) {
    if (!r.heuristic && !r.pass) return false;
  }
  return true;
}

ojson ReportBundle::to_json() const {
  ojson j;
  j["tool"] = "lieaut";
  j["version"] = LIEAUT_VERSION;
  j["command"] = command;
  j["config"] = config;
  ojson rs = ojson::array();
  for (const auto& r : reports) rs.push_back(report_to_json(r));
  j["reports"] = rs;
  j["overall_pass"] = overall_pass();
  return j;
}

ojson ReportBundle::canonical() const {
  ojson j = to_json();
  for (auto& r : j["reports"]) r.erase("wall_time_ms");
  return j;
}

std::string ReportBundle::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "report,index,metric,value\n";
  for (const auto& r : reports) {
    const std::string metric = r.csv_metric.empty() ? "value" : r.csv_metric;
    for (std::size_t i = 0; i < r.sample_values.size(); ++i) {
      out << r.name << ',' << i << ',' << metric << ',' << r.sample_values[i] << '\n';
    }
    out << r.name << ",," << "worst_margin" << ',' << r.worst_margin << '\n';
  }
  return out.str();
}

ojson witness_mat(const UniMat2& g) {
  return ojson::array({g.a.real(), g.a.imag(), g.b.real(), g.b.imag(), g.c.real(), g.c.imag(),
                       g.d.real(), g.d.imag()});
}

ojson witness_triple(const Triple& t) {
  return ojson::array(
      {t.z1.real(), t.z1.imag(), t.z2.real(), t.z2.imag(), t.z3.real(), t.z3.imag()});
}

}  // namespace lieaut

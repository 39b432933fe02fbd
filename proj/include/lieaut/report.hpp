#pragma once

#include "lieaut/matgroups.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace lieaut {

using ojson = nlohmann::ordered_json;

// Structured outcome of one verification run. Witness is present whenever
// pass is false; heuristic probes never affect a bundle's overall verdict.
struct VerificationReport {
  std::string name;
  bool pass = false;
  bool heuristic = false;
  std::uint64_t samples = 0;
  double worst_margin = 0.0;
  ojson witness;  // null unless a concrete offending input exists
  std::uint64_t seed = 0;
  double wall_time_ms = 0.0;
  ojson values = ojson::object();  // extra named metrics
  std::vector<double> sample_values;  // per-sample numbers, only kept for CSV export
  std::string csv_metric;             // column label for sample_values
};

ojson report_to_json(const VerificationReport& r);

struct ReportBundle {
  std::string command;
  ojson config = ojson::object();
  std::vector<VerificationReport> reports;

  bool overall_pass() const;
  ojson to_json() const;
  // Canonical form for determinism comparisons: wall-time/timestamp fields
  // stripped, per the report contract.
  ojson canonical() const;
  std::string to_csv() const;
};

// Witness serialization: matrices as 8 reals row-major (re, im interleaved),
// triples as 6 reals.
ojson witness_mat(const UniMat2& g);
ojson witness_triple(const Triple& t);

// Runs body() and stores the elapsed milliseconds into the report.
template <class Body>
VerificationReport timed(Body body) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport r = body();
  const auto t1 = std::chrono::steady_clock::now();
  r.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return r;
}

}  // namespace lieaut

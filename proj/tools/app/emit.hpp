#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "stefan/stepper.hpp"

namespace stefan::app {

// Line-oriented CSV writer; numbers use the shortest round-trip decimal form.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header);
  void row(const std::vector<double>& values);
  void text_row(const std::vector<std::string>& cells);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

struct TimeseriesRow {
  double t = 0.0;
  double R_mean = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  double E_total = 0.0;
  double S_total = 0.0;
  double V_max = 0.0;
  double res_inner = 0.0;
};

inline constexpr const char* kTimeseriesHeader = "t,R_mean,h_min,h_max,E_total,S_total,V_max,res_inner";
inline constexpr const char* kSnapshotHeader = "s,r,theta";
inline constexpr const char* kInterfaceHeader = "s,h,H,beta,V";

TimeseriesRow timeseries_row(const Diagnostics& d, double res_inner);
void write_timeseries(const std::filesystem::path& path, const std::vector<TimeseriesRow>& rows);
// snapshot_<n>.csv on the reference grid and snapshot_<n>_interface.csv on Sigma.
void write_snapshot(const std::filesystem::path& dir, int n, const State& z);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace stefan::app

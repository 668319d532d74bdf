#include "emit.hpp"

#include <cerrno>
#include <cstring>

#include "config.hpp"
#include "stefan/interface_calc.hpp"

namespace stefan::app {

namespace {

[[noreturn]] void io_failure(const std::filesystem::path& path, const char* what) {
  throw Error(std::string(what) + " '" + path.string() + "': " + std::strerror(errno));
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path) {
  if (!out_) io_failure(path, "cannot open");
  out_ << header << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
  out_ << '\n';
  if (!out_) io_failure(path_, "write failed for");
}

void CsvWriter::text_row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
  if (!out_) io_failure(path_, "write failed for");
}

void CsvWriter::close() {
  out_.close();
  if (!out_) io_failure(path_, "close failed for");
}

TimeseriesRow timeseries_row(const Diagnostics& d, double res_inner) {
  return {d.t, d.R_mean, d.h_min, d.h_max, d.E_total, d.S_total, d.V_max, res_inner};
}

void write_timeseries(const std::filesystem::path& path, const std::vector<TimeseriesRow>& rows) {
  CsvWriter w(path, kTimeseriesHeader);
  for (const auto& r : rows) w.row({r.t, r.R_mean, r.h_min, r.h_max, r.E_total, r.S_total, r.V_max, r.res_inner});
  w.close();
}

void write_snapshot(const std::filesystem::path& dir, int n, const State& z) {
  const TubularChart& c = z.theta.chart();
  const Eigen::ArrayXXd& th = z.theta.values();
  CsvWriter bulk(dir / ("snapshot_" + std::to_string(n) + ".csv"), kSnapshotHeader);
  for (int i = 0; i < c.n_radial(); ++i)
    for (int j = 0; j < c.n_s; ++j) bulk.row({c.angle(j), c.rho(i), th(i, j)});
  bulk.close();

  const Eigen::VectorXd H = mean_curvature(z.h);
  const Eigen::VectorXd be = beta(z.h);
  CsvWriter iface(dir / ("snapshot_" + std::to_string(n) + "_interface.csv"), kInterfaceHeader);
  for (int j = 0; j < c.n_s; ++j) iface.row({c.angle(j), z.h[j], H(j), be(j), be(j) * z.dth(j)});
  iface.close();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) io_failure(path, "cannot open");
  out << text;
  out.close();
  if (!out) io_failure(path, "write failed for");
}

}  // namespace stefan::app

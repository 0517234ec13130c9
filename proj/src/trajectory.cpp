#include "rdtf/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rdtf/field_ops.hpp"

namespace rdtf {

void FlowTrajectory::append(FlowSlice slice) {
  if (!(slice.t > 0.0)) throw Error(ErrorCode::InvalidArgument, "stored slices need t > 0");
  if (!slices_.empty() && !(slice.t > slices_.back().t))
    throw Error(ErrorCode::InvalidArgument, "slice times must strictly increase");
  require_same_grid(slice.metric.grid(), initial_.grid());
  slices_.push_back(std::move(slice));
}

std::vector<double> FlowTrajectory::times() const {
  std::vector<double> t;
  t.reserve(slices_.size());
  for (const auto& s : slices_) t.push_back(s.t);
  return t;
}

long FlowTrajectory::find(double t, double rel_tol) const {
  for (std::size_t i = 0; i < slices_.size(); ++i)
    if (std::abs(slices_[i].t - t) <= rel_tol * std::max(std::abs(t), 1e-300)) return static_cast<long>(i);
  return -1;
}

MetricField FlowTrajectory::metric_at(double t) const {
  if (t < 0.0 || t > final_time() * (1.0 + 1e-12))
    throw Error(ErrorCode::InvalidArgument, "time outside the trajectory span");
  double t0 = 0.0;
  const MetricField* g0 = &initial_;
  for (const auto& s : slices_) {
    if (t <= s.t) {
      const double w = s.t > t0 ? (t - t0) / (s.t - t0) : 1.0;
      if (w >= 1.0) return s.metric;
      if (w <= 0.0) return *g0;
      MetricField out = s.metric;
      for (std::size_t n = 0; n < out.size(); ++n)
        for (int i = 0; i < kMaxDim; ++i)
          for (int j = 0; j < kMaxDim; ++j) out[n][i][j] = (1.0 - w) * (*g0)[n][i][j] + w * s.metric[n][i][j];
      out.time_tag = t;
      return out;
    }
    t0 = s.t;
    g0 = &s.metric;
  }
  return slices_.back().metric;
}

std::vector<std::string> save_trajectory(const FlowTrajectory& traj, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> files;
  const std::string init = (fs::path(dir) / "slice_initial.bin").string();
  write_binary(init, traj.initial());
  files.push_back(init);
  const std::string manifest = (fs::path(dir) / "manifest.csv").string();
  std::ofstream os(manifest);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + manifest);
  os << "index,t,file,sup_deviation,sup_gradient,sup_hessian,sup_scalar,sup_riemann,sup_scalar_gradient\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "slice_%04zu.bin", i);
    const std::string path = (fs::path(dir) / name).string();
    write_binary(path, traj[i].metric);
    files.push_back(path);
    const auto& d = traj[i].diagnostics;
    os << i << ',' << traj[i].t << ',' << name << ',' << d.sup_deviation << ',' << d.sup_gradient << ','
       << d.sup_hessian << ',' << d.sup_scalar << ',' << d.sup_riemann << ',' << d.sup_scalar_gradient << '\n';
  }
  files.push_back(manifest);
  return files;
}

FlowTrajectory load_trajectory(const std::string& dir) {
  namespace fs = std::filesystem;
  FlowTrajectory traj(read_metric_binary((fs::path(dir) / "slice_initial.bin").string()));
  std::ifstream is((fs::path(dir) / "manifest.csv").string());
  if (!is) throw Error(ErrorCode::Io, "missing manifest.csv in " + dir);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw Error(ErrorCode::Io, "malformed manifest row: " + line);
    FlowSlice s;
    s.t = std::stod(cells[1]);
    s.metric = read_metric_binary((fs::path(dir) / cells[2]).string());
    s.metric.time_tag = s.t;
    s.diagnostics = {std::stod(cells[3]), std::stod(cells[4]), std::stod(cells[5]),
                     std::stod(cells[6]), std::stod(cells[7]), std::stod(cells[8])};
    traj.append(std::move(s));
  }
  return traj;
}

}  // namespace rdtf

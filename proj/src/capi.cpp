#include "rdtf/rdtf.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "rdtf/curvature.hpp"
#include "rdtf/field_ops.hpp"
#include "rdtf/flow.hpp"
#include "rdtf/norms.hpp"
#include "rdtf/runner.hpp"
#include "rdtf/weak_scalar.hpp"

struct rdtf_metric {
  rdtf::MetricField g;
};
struct rdtf_scalar {
  rdtf::ScalarField f;
};
struct rdtf_trajectory {
  rdtf::FlowTrajectory traj;
};

namespace {

thread_local std::string last_error;

rdtf_status to_status(rdtf::ErrorCode code) {
  using rdtf::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return RDTF_INVALID_ARGUMENT;
    case ErrorCode::GridMismatch: return RDTF_GRID_MISMATCH;
    case ErrorCode::NotPositiveDefinite: return RDTF_NOT_POSITIVE_DEFINITE;
    case ErrorCode::CflViolation: return RDTF_CFL;
    case ErrorCode::ResolutionFloor: return RDTF_RESOLUTION_FLOOR;
    case ErrorCode::InsufficientRange: return RDTF_INSUFFICIENT_RANGE;
    case ErrorCode::Io: return RDTF_IO;
    case ErrorCode::Config: return RDTF_CONFIG;
  }
  return RDTF_INTERNAL;
}

template <class Fn>
rdtf_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const rdtf::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return RDTF_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return RDTF_INTERNAL;
  }
}

rdtf_status invalid(const char* what) {
  last_error = what;
  return RDTF_INVALID_ARGUMENT;
}

rdtf::GridSpec to_grid(const rdtf_grid_params& p) {
  return rdtf::GridSpec::make(p.dim, p.half_width, p.points, p.collar_width);
}

}  // namespace

extern "C" {

const char* rdtf_last_error(void) { return last_error.c_str(); }

const char* rdtf_version(void) { return RDTF_VERSION_STRING; }

const char* rdtf_status_name(rdtf_status status) {
  switch (status) {
    case RDTF_OK: return "ok";
    case RDTF_INVALID_ARGUMENT: return "invalid argument";
    case RDTF_GRID_MISMATCH: return "grid mismatch";
    case RDTF_NOT_POSITIVE_DEFINITE: return "not positive definite";
    case RDTF_CFL: return "CFL violation";
    case RDTF_RESOLUTION_FLOOR: return "resolution floor";
    case RDTF_INSUFFICIENT_RANGE: return "insufficient range";
    case RDTF_IO: return "I/O error";
    case RDTF_CONFIG: return "configuration error";
    case RDTF_CHECK_FAILED: return "check failed";
    case RDTF_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void rdtf_cone_defaults(rdtf_cone_params* out) {
  if (!out) return;
  const rdtf::ConeParams d;
  std::memset(out, 0, sizeof *out);
  for (int k = 0; k < 3; ++k) out->center[k] = d.centre[k];
  out->sigma = d.sigma;
  out->amplitude = d.amplitude;
  out->p = d.p;
  out->direction = d.direction == rdtf::ConeDirection::E11 ? 1 : 0;
  out->bump_inner = d.bump_inner;
  out->bump_outer = d.bump_outer;
}

rdtf_status rdtf_metric_flat(const rdtf_grid_params* grid, rdtf_metric** out) {
  if (!grid || !out) return invalid("null argument");
  return guarded([&] {
    *out = new rdtf_metric{rdtf::MetricField::flat(to_grid(*grid))};
    return RDTF_OK;
  });
}

rdtf_status rdtf_metric_cone(const rdtf_grid_params* grid, const rdtf_cone_params* cone, rdtf_metric** out) {
  if (!grid || !cone || !out) return invalid("null argument");
  if (cone->direction != 0 && cone->direction != 1) return invalid("cone direction must be 0 or 1");
  return guarded([&] {
    rdtf::ConeParams c;
    for (int k = 0; k < 3; ++k) c.centre[k] = cone->center[k];
    c.sigma = cone->sigma;
    c.amplitude = cone->amplitude;
    c.p = cone->p;
    c.direction = cone->direction == 1 ? rdtf::ConeDirection::E11 : rdtf::ConeDirection::Identity;
    c.bump_inner = cone->bump_inner;
    c.bump_outer = cone->bump_outer;
    *out = new rdtf_metric{rdtf::make_w1p_cone(to_grid(*grid), c)};
    return RDTF_OK;
  });
}

rdtf_status rdtf_metric_load(const char* path, rdtf_metric** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&] {
    *out = new rdtf_metric{rdtf::read_metric_binary(path)};
    return RDTF_OK;
  });
}

rdtf_status rdtf_metric_save(const rdtf_metric* g, const char* path) {
  if (!g || !path) return invalid("null argument");
  return guarded([&] {
    rdtf::write_binary(path, g->g);
    return RDTF_OK;
  });
}

rdtf_status rdtf_metric_save_csv(const rdtf_metric* g, const char* path) {
  if (!g || !path) return invalid("null argument");
  return guarded([&] {
    std::ofstream os(path);
    if (!os) throw rdtf::Error(rdtf::ErrorCode::Io, std::string("cannot write ") + path);
    rdtf::write_csv(os, g->g);
    return RDTF_OK;
  });
}

rdtf_status rdtf_metric_node_count(const rdtf_metric* g, size_t* out) {
  if (!g || !out) return invalid("null argument");
  *out = g->g.size();
  return RDTF_OK;
}

rdtf_status rdtf_metric_get(const rdtf_metric* g, size_t node, double* out) {
  if (!g || !out) return invalid("null argument");
  if (node >= g->g.size()) return invalid("node index out of range");
  const int n = g->g.grid().dim;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i * n + j] = g->g[node][i][j];
  return RDTF_OK;
}

void rdtf_metric_free(rdtf_metric* g) { delete g; }

rdtf_status rdtf_scalar_curvature(const rdtf_metric* g, rdtf_scalar** out) {
  if (!g || !out) return invalid("null argument");
  return guarded([&] {
    *out = new rdtf_scalar{rdtf::scalar_curvature(g->g)};
    return RDTF_OK;
  });
}

rdtf_status rdtf_scalar_size(const rdtf_scalar* f, size_t* out) {
  if (!f || !out) return invalid("null argument");
  *out = f->f.size();
  return RDTF_OK;
}

rdtf_status rdtf_scalar_data(const rdtf_scalar* f, const double** out) {
  if (!f || !out) return invalid("null argument");
  *out = f->f.values().data();
  return RDTF_OK;
}

void rdtf_scalar_free(rdtf_scalar* f) { delete f; }

rdtf_status rdtf_c0_distance(const rdtf_metric* a, const rdtf_metric* b, double* out) {
  if (!a || !b || !out) return invalid("null argument");
  return guarded([&] {
    *out = rdtf::c0_distance(a->g, b->g).value;
    return RDTF_OK;
  });
}

rdtf_status rdtf_flow_run(const rdtf_metric* g0, double t_end, double sigma, int snapshots, int per_octave,
                          rdtf_trajectory** out) {
  if (!g0 || !out) return invalid("null argument");
  if (snapshots < 1 || per_octave < 1) return invalid("snapshots and per_octave must be >= 1");
  return guarded([&] {
    rdtf::FlowOptions opts;
    opts.sigma = sigma;
    auto traj = rdtf::run_flow(g0->g, t_end, rdtf::geometric_snapshots(t_end, snapshots, per_octave), opts);
    *out = new rdtf_trajectory{std::move(traj)};
    return RDTF_OK;
  });
}

rdtf_status rdtf_trajectory_size(const rdtf_trajectory* tr, size_t* out) {
  if (!tr || !out) return invalid("null argument");
  *out = tr->traj.size();
  return RDTF_OK;
}

rdtf_status rdtf_trajectory_time(const rdtf_trajectory* tr, size_t index, double* out) {
  if (!tr || !out) return invalid("null argument");
  if (index >= tr->traj.size()) return invalid("slice index out of range");
  *out = tr->traj[index].t;
  return RDTF_OK;
}

rdtf_status rdtf_trajectory_metric(const rdtf_trajectory* tr, size_t index, rdtf_metric** out) {
  if (!tr || !out) return invalid("null argument");
  if (index >= tr->traj.size()) return invalid("slice index out of range");
  return guarded([&] {
    *out = new rdtf_metric{tr->traj[index].metric};
    return RDTF_OK;
  });
}

rdtf_status rdtf_trajectory_save(const rdtf_trajectory* tr, const char* dir) {
  if (!tr || !dir) return invalid("null argument");
  return guarded([&] {
    rdtf::save_trajectory(tr->traj, dir);
    return RDTF_OK;
  });
}

rdtf_status rdtf_trajectory_load(const char* dir, rdtf_trajectory** out) {
  if (!dir || !out) return invalid("null argument");
  return guarded([&] {
    *out = new rdtf_trajectory{rdtf::load_trajectory(dir)};
    return RDTF_OK;
  });
}

void rdtf_trajectory_free(rdtf_trajectory* tr) { delete tr; }

rdtf_status rdtf_config_validate(const char* path) {
  if (!path) return invalid("null argument");
  return guarded([&] {
    rdtf::load_config(path);
    return RDTF_OK;
  });
}

rdtf_status rdtf_run_config(const char* path, const char* output_root, int* passed) {
  if (!path) return invalid("null argument");
  return guarded([&] {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw rdtf::Error(rdtf::ErrorCode::Io, std::string("cannot read config ") + path);
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string text = ss.str();
    const rdtf::ExperimentConfig cfg = rdtf::parse_config(text);
    const rdtf::RunManifest m = rdtf::run_experiments(cfg, text, output_root ? output_root : "");
    if (passed) *passed = m.passed ? 1 : 0;
    for (const auto& e : m.experiments)
      if (e.status == "error") {
        last_error = e.message;
        return RDTF_CHECK_FAILED;
      }
    return RDTF_OK;
  });
}

rdtf_status rdtf_list_experiments(char* buf, size_t len, size_t* needed) {
  return guarded([&] {
    const std::string table = rdtf::list_experiments();
    if (needed) *needed = table.size() + 1;
    if (buf && len > 0) {
      const size_t n = std::min(len - 1, table.size());
      std::memcpy(buf, table.data(), n);
      buf[n] = '\0';
    }
    return RDTF_OK;
  });
}

}  // extern "C"

#include "otfs/grid.hpp"

#include <cmath>
#include <string>

namespace otfs {

namespace {

void check_counts(int m, int n) {
  if (m < 1) throw InvariantError("M", "must be >= 1, got " + std::to_string(m));
  if (n < 1) throw InvariantError("N", "must be >= 1, got " + std::to_string(n));
}

}  // namespace

DdGrid::DdGrid(int m, int n, double delta_f) : DdGrid(m, n, delta_f, delta_f > 0.0 ? 1.0 / delta_f : 0.0) {}

DdGrid::DdGrid(int m, int n, double delta_f, double t) : m_(m), n_(n), delta_f_(delta_f), t_(t) {
  check_counts(m, n);
  if (!(delta_f > 0.0) || !std::isfinite(delta_f)) {
    throw InvariantError("delta_f", "subcarrier spacing must be a positive finite value");
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvariantError("T", "symbol duration must be a positive finite value");
  }
  if (std::abs(t * delta_f - 1.0) > 1e-9) {
    throw InvariantError("T", "lattice must be critically sampled (T * delta_f == 1)");
  }
}

}  // namespace otfs

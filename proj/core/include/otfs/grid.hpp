#pragma once

#include "otfs/error.hpp"
#include "otfs/types.hpp"

namespace otfs {

/// Geometry of the M x N delay-Doppler / time-frequency lattice.
///
/// M counts subcarriers (delay bins), N counts OTFS symbols (Doppler bins).
/// The lattice is critically sampled: symbol_duration * subcarrier_spacing == 1.
class DdGrid {
 public:
  /// Symbol duration is derived as 1 / delta_f.
  DdGrid(int m, int n, double delta_f);
  /// Rejects any (delta_f, t) pair that is not critically sampled.
  DdGrid(int m, int n, double delta_f, double t);

  int M() const noexcept { return m_; }
  int N() const noexcept { return n_; }
  /// NM, the length of a vectorized frame.
  int size() const noexcept { return m_ * n_; }
  double subcarrier_spacing() const noexcept { return delta_f_; }
  double symbol_duration() const noexcept { return t_; }
  /// Baseband sample period 1 / (M * delta_f).
  double sample_period() const noexcept { return 1.0 / (m_ * delta_f_); }

  friend bool operator==(const DdGrid&, const DdGrid&) = default;

 private:
  int m_;
  int n_;
  double delta_f_;
  double t_;
};

struct DelayDopplerDomain;
struct TimeFrequencyDomain;

/// An M x N complex frame tagged with the lattice it lives on. Rows index
/// delay (or frequency), columns index Doppler (or time).
template <class Domain>
class LatticeFrame {
 public:
  explicit LatticeFrame(const DdGrid& grid) : grid_(grid), data_(CMatrix::Zero(grid.M(), grid.N())) {}

  LatticeFrame(const DdGrid& grid, CMatrix data) : grid_(grid), data_(std::move(data)) {
    if (data_.rows() != grid_.M() || data_.cols() != grid_.N()) {
      throw DimensionError("frame shape " + std::to_string(data_.rows()) + "x" +
                           std::to_string(data_.cols()) + " does not match grid " +
                           std::to_string(grid_.M()) + "x" + std::to_string(grid_.N()));
    }
  }

  const DdGrid& grid() const noexcept { return grid_; }
  const CMatrix& data() const noexcept { return data_; }
  Complex operator()(int row, int col) const { return data_(row, col); }

 private:
  DdGrid grid_;
  CMatrix data_;
};

using DdFrame = LatticeFrame<DelayDopplerDomain>;
using TfFrame = LatticeFrame<TimeFrequencyDomain>;

}  // namespace otfs

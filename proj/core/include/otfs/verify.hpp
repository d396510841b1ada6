#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "otfs/types.hpp"

namespace otfs {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Mutation self-test: corrupt the MMSE generator indexing.
  bool inject_mmse_index_fault = false;
  /// Paired frames used by mismatch_degradation.
  int mismatch_frames = 400;
};

/// Names of the desk-scale properties, in execution order.
const std::vector<std::string>& property_names();

/// Runs every property. `on_result`, when set, is called as each one ends.
std::vector<PropertyResult> run_verification(const VerifyOptions& options,
                                             const std::function<void(const PropertyResult&)>& on_result = {});

/// max over blocks (i, k) of |block(i, k) - block(0, (k - i) mod N)| for an
/// NM x NM matrix made of M x M blocks.
double block_shift_deviation(const CMatrix& a, int m, int n);

/// One-sided two-proportion z statistic for H1: p_a > p_b.
double proportion_z(std::uint64_t errors_a, std::uint64_t bits_a, std::uint64_t errors_b, std::uint64_t bits_b);

}  // namespace otfs

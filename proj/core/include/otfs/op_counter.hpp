#pragma once

#include <cstdint>

namespace otfs::ops {

/// Instrumented work counters. Complex multiplications (and divisions) are
/// counted where they happen; calls into dense library kernels are charged
/// with the textbook count of the algorithm they run.
struct Counts {
  std::uint64_t mults = 0;
  /// Blocks the pivot-free LU rejected and the pivoted band LU inverted.
  std::uint64_t structured_fallbacks = 0;

  Counts& operator+=(const Counts& other) {
    mults += other.mults;
    structured_fallbacks += other.structured_fallbacks;
    return *this;
  }
  friend Counts operator-(Counts a, const Counts& b) {
    a.mults -= b.mults;
    a.structured_fallbacks -= b.structured_fallbacks;
    return a;
  }
};

/// Per-thread accumulator. Independent threads never share counts.
Counts& thread_counts();

inline void add_mults(std::uint64_t n) { thread_counts().mults += n; }

/// Captures the counter value at construction; `delta()` reports work done
/// on this thread since then.
class ScopedCount {
 public:
  ScopedCount() : start_(thread_counts()) {}
  Counts delta() const { return thread_counts() - start_; }

 private:
  Counts start_;
};

/// Records that an NM x NM dense operator was materialized. Process-wide.
void note_dense_materialization(std::uint64_t dimension);
std::uint64_t dense_materializations();
std::uint64_t largest_dense_dimension();

}  // namespace otfs::ops

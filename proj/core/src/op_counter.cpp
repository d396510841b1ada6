#include "otfs/op_counter.hpp"

#include <atomic>

namespace otfs::ops {

namespace {
std::atomic<std::uint64_t> g_dense_count{0};
std::atomic<std::uint64_t> g_dense_largest{0};
}  // namespace

Counts& thread_counts() {
  thread_local Counts counts;
  return counts;
}

void note_dense_materialization(std::uint64_t dimension) {
  g_dense_count.fetch_add(1, std::memory_order_relaxed);
  std::uint64_t prev = g_dense_largest.load(std::memory_order_relaxed);
  while (prev < dimension &&
         !g_dense_largest.compare_exchange_weak(prev, dimension, std::memory_order_relaxed)) {
  }
}

std::uint64_t dense_materializations() { return g_dense_count.load(std::memory_order_relaxed); }

std::uint64_t largest_dense_dimension() { return g_dense_largest.load(std::memory_order_relaxed); }

}  // namespace otfs::ops

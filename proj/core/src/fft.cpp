#include "otfs/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "otfs/op_counter.hpp"

namespace otfs::fft {

namespace {

using PlanKey = std::tuple<int, int, int, int, int>;

// Plans are created under a lock and never destroyed. fftw_execute_dft on a
// finished plan is thread-safe.
class PlanCache {
 public:
  fftw_plan get(int n, int howmany, int stride, int dist, Direction dir) {
    const PlanKey key{n, howmany, stride, dist, dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD};
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const std::size_t span = static_cast<std::size_t>((howmany - 1) * dist + (n - 1) * stride + 1);
    std::vector<Complex> scratch(span);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    int dims[1] = {n};
    fftw_plan plan = fftw_plan_many_dft(1, dims, howmany, buf, nullptr, stride, dist, buf, nullptr, stride,
                                        dist, std::get<4>(key), FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache* instance = new PlanCache;
  return *instance;
}

}  // namespace

void transform_batch(Complex* data, int n, int howmany, int stride, int dist, Direction dir) {
  if (n <= 1 || howmany <= 0) return;
  fftw_plan plan = cache().get(n, howmany, stride, dist, dir);
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, buf, buf);
  ops::add_mults(static_cast<std::uint64_t>(howmany) * nominal_mults(n));
}

std::uint64_t nominal_mults(int n) {
  if (n <= 1) return 0;
  const double stages = std::ceil(std::log2(static_cast<double>(n)) - 1e-12);
  return static_cast<std::uint64_t>(std::ceil(0.5 * n * stages));
}

}  // namespace otfs::fft

#include "otfs/delay_pattern.hpp"

#include <algorithm>
#include <string>

#include "otfs/error.hpp"

namespace otfs {

DelayPattern::DelayPattern(std::vector<int> offsets, int m) : offsets_(std::move(offsets)), m_(m) {
  if (m_ < 1) throw InvariantError("M", "pattern dimension must be >= 1");
  if (offsets_.empty()) throw InvariantError("d", "at least one tap offset is required");
  if (offsets_.front() < 0) throw InvariantError("d", "tap offsets must be non-negative");
  for (std::size_t k = 1; k < offsets_.size(); ++k) {
    if (offsets_[k] <= offsets_[k - 1]) {
      throw InvariantError("d", "tap offsets must be strictly increasing and distinct");
    }
  }
  if (offsets_.back() >= m_) {
    throw InvariantError("D_P", "maximum delay position D_P = " + std::to_string(offsets_.back()) +
                                    " must satisfy D_P < M = " + std::to_string(m_));
  }
}

std::vector<int> DelayPattern::segments() const {
  std::vector<int> u = offsets_;
  u.push_back(boundary());
  return u;
}

bool DelayPattern::contains_offset(int offset) const noexcept {
  return std::binary_search(offsets_.begin(), offsets_.end(), offset);
}

}  // namespace otfs

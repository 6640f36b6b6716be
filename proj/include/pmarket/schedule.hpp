#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pmarket {

/// Infinite cyclic speaking order given by a finite repeating block of
/// zero-based expert indices. One pass over the block is one round.
class Schedule {
 public:
  /// Throws InvalidModel if the block is empty.
  explicit Schedule(std::vector<std::size_t> block);

  /// (0, 1, ..., n-1).
  static Schedule round_robin(std::size_t experts);

  const std::vector<std::size_t>& block() const { return block_; }
  std::size_t period() const { return block_.size(); }
  std::size_t expert_at(std::size_t step) const { return block_[step % block_.size()]; }

  /// Throws InvalidModel if any index is >= experts.
  void validate(std::size_t experts) const;

  /// Block in one-based notation, e.g. "(E2,E1)".
  std::string str() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  std::vector<std::size_t> block_;
};

}  // namespace pmarket

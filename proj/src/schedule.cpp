#include "pmarket/schedule.hpp"

#include <numeric>

#include "pmarket/errors.hpp"

namespace pmarket {

Schedule::Schedule(std::vector<std::size_t> block) : block_(std::move(block)) {
  if (block_.empty()) throw InvalidModel("schedule block must be non-empty");
}

Schedule Schedule::round_robin(std::size_t experts) {
  std::vector<std::size_t> block(experts);
  std::iota(block.begin(), block.end(), std::size_t{0});
  return Schedule(std::move(block));
}

void Schedule::validate(std::size_t experts) const {
  for (auto e : block_) {
    if (e >= experts) {
      throw InvalidModel("schedule names expert E" + std::to_string(e + 1) + " but only " +
                         std::to_string(experts) + " experts exist");
    }
  }
}

std::string Schedule::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < block_.size(); ++i) {
    if (i > 0) out += ",";
    out += "E" + std::to_string(block_[i] + 1);
  }
  return out + ")";
}

}  // namespace pmarket

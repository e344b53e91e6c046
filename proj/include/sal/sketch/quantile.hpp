/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#ifndef SAL_SKETCH_QUANTILE_HPP
#define SAL_SKETCH_QUANTILE_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace sal::sketch {

/**
 * Sliding-window median over basic windows.
 *
 * The active basic window is kept sorted and exact.  When it closes it is
 * compressed to every step-th value, each standing for step items, where
 * step = max(1, floor(epsilon * b / 2)); this costs at most step - 1 ranks
 * per closed window.  Expiry follows the BasicWindowTopK coverage rule.
 * The query returns the weighted lower median (rank ceil(W/2)).
 */
class QuantileSketch {
public:
  QuantileSketch(double epsilon, std::uint64_t window, std::uint64_t basicWindow);

  void insert(double x);

  std::optional<double> median() const;
  /// Smallest stored value whose cumulative weight reaches rank (1-based).
  std::optional<double> quantileAtRank(std::uint64_t rank) const;

  std::uint64_t coveredItems() const noexcept { return closedItems_ + active_.size(); }
  std::size_t closedWindows() const noexcept { return closed_.size(); }
  std::uint64_t step() const noexcept { return step_; }
  /// Stored samples over all basic windows.
  std::size_t storedValues() const noexcept;

  std::string dumpJson() const;

private:
  struct Sample {
    double value;
    std::uint64_t weight;
  };
  struct Block {
    std::vector<Sample> samples;
    std::uint64_t items;
  };

  void mergeClosed() const;

  double epsilon_;
  std::uint64_t window_;
  std::uint64_t basicWindow_;
  std::uint64_t step_;
  std::vector<double> active_;
  std::deque<Block> closed_;
  std::uint64_t closedItems_ = 0;
  mutable std::vector<Sample> merged_;
  mutable bool mergedValid_ = true;
};

} // namespace sal::sketch

#endif

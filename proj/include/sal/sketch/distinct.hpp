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

#ifndef SAL_SKETCH_DISTINCT_HPP
#define SAL_SKETCH_DISTINCT_HPP

#include <cstdint>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

namespace sal::sketch {

inline constexpr unsigned kDefaultPrecision = 14;

/// HyperLogLog register set with an incrementally maintained harmonic sum.
class HllRegisters {
public:
  explicit HllRegisters(unsigned precision = kDefaultPrecision);

  unsigned precision() const noexcept { return precision_; }
  std::size_t size() const noexcept { return registers_.size(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return registers_[i]; }

  void addHash(std::uint64_t hash);
  /// Raises register idx to rho if larger.
  void update(std::uint32_t idx, std::uint8_t rho);
  void merge(HllRegisters const& other);
  void clear();

  double estimate() const noexcept;

  bool operator==(HllRegisters const& other) const noexcept
  {
    return precision_ == other.precision_ && registers_ == other.registers_;
  }

  /// Register index and rank for a hash under this precision.
  static std::pair<std::uint32_t, std::uint8_t> split(std::uint64_t hash, unsigned precision) noexcept;

private:
  unsigned precision_;
  std::vector<std::uint8_t> registers_;
  double harmonic_;
  std::size_t zeros_;
};

/**
 * Distinct count over a sliding window of basic windows, each holding the
 * HyperLogLog updates of its items.  Basic windows expire as a whole with
 * the same coverage rule as BasicWindowTopK.  The union over covered windows
 * is kept current on insert and rebuilt on expiry.
 */
class DistinctSketch {
public:
  DistinctSketch(std::uint64_t window, std::uint64_t basicWindow,
                 unsigned precision = kDefaultPrecision, std::uint64_t seed = 0);

  void insert(std::string_view item);

  /// Rounded cardinality estimate of the covered items; 0 when empty.
  double estimate() const noexcept;

  std::uint64_t coveredItems() const noexcept { return closedItems_ + activeItems_; }
  std::size_t closedWindows() const noexcept { return closed_.size(); }
  HllRegisters const& registers() const noexcept { return current_; }

  std::string dumpJson() const;

private:
  struct Block {
    std::vector<std::uint32_t> sparse;   // (idx << 8) | rho
    std::vector<std::uint8_t> dense;     // used once sparse grows past m/4
    std::uint64_t items = 0;
  };

  void record(Block& block, std::uint32_t idx, std::uint8_t rho);
  void applyTo(HllRegisters& target, Block const& block) const;
  void rebuild();

  std::uint64_t window_;
  std::uint64_t basicWindow_;
  std::uint64_t seed_;
  Block active_;
  std::uint64_t activeItems_ = 0;
  std::deque<Block> closed_;
  std::uint64_t closedItems_ = 0;
  HllRegisters current_;
};

} // namespace sal::sketch

#endif

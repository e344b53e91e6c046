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

#ifndef SAL_SKETCH_TOPK_HPP
#define SAL_SKETCH_TOPK_HPP

#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sal::sketch {

/// (item, relative frequency) pairs, most frequent first.
using TopKList = std::vector<std::pair<std::string, double>>;

/**
 * Frequent items over a sliding window made of basic windows.
 *
 * Counts are exact inside each basic window of b items.  A closed basic
 * window is dropped once the remaining ones still cover at least N items,
 * so the covered item count lies in [min(n, N), N + b - 1] and at most
 * ceil(N/b) closed windows are retained.  Frequencies are relative to the
 * covered item count.  Ties are broken by item in ascending byte order.
 */
class BasicWindowTopK {
public:
  BasicWindowTopK(std::uint64_t window, std::uint64_t basicWindow, std::uint64_t k);

  void insert(std::string_view item);

  /// At most k entries; empty when nothing is covered.
  TopKList query() const;
  /// Frequency of the i-th most frequent item, 0 when fewer than i + 1 items exist.
  double value(std::size_t i) const;

  std::uint64_t coveredItems() const noexcept { return closedItems_ + activeItems_; }
  std::size_t closedWindows() const noexcept { return closed_.size(); }
  std::size_t distinctItems() const noexcept { return totals_.size(); }
  std::uint64_t window() const noexcept { return window_; }
  std::uint64_t basicWindow() const noexcept { return basicWindow_; }
  std::uint64_t k() const noexcept { return k_; }

  std::string dumpJson() const;

private:
  using Counts = std::unordered_map<std::string, std::uint64_t>;
  struct Closed {
    Counts counts;
    std::uint64_t items;
  };
  struct ByCount {
    bool operator()(std::pair<std::uint64_t, std::string const*> const& a,
                    std::pair<std::uint64_t, std::string const*> const& b) const
    {
      if (a.first != b.first) return a.first > b.first;
      return *a.second < *b.second;
    }
  };

  void adjust(std::string const& item, std::int64_t delta);
  void rollover();

  std::uint64_t window_;
  std::uint64_t basicWindow_;
  std::uint64_t k_;
  Counts active_;
  std::uint64_t activeItems_ = 0;
  std::deque<Closed> closed_;
  std::uint64_t closedItems_ = 0;
  Counts totals_;
  std::set<std::pair<std::uint64_t, std::string const*>, ByCount> ranking_;
};

} // namespace sal::sketch

#endif

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

#ifndef SAL_ENGINE_FEATURE_HPP
#define SAL_ENGINE_FEATURE_HPP

#include <sal/sketch/topk.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace sal::engine {

/**
 * COLLAPSE state for one kept-key value l: each dropped-key value m in M_l
 * maps to the FOR feature values last seen with it.  Holds at most
 * `capacity` entries and evicts the least recently updated one.
 */
class MapFeature {
public:
  using Values = std::vector<std::optional<double>>;

  struct Entry {
    Values values;
    std::uint64_t lastTouch = 0;
  };

  MapFeature(std::size_t columns, std::size_t capacity);

  void update(std::string const& droppedKey, Values values);

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t columns() const noexcept { return columns_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::uint64_t evictions() const noexcept { return evictions_; }

  /// Ordered by dropped-key string.
  std::map<std::string, Entry> const& entries() const noexcept { return entries_; }

  /// Ready values of one column, in dropped-key order.
  std::vector<double> column(std::size_t c) const;

  bool operator==(MapFeature const& other) const;

private:
  std::size_t columns_;
  std::size_t capacity_;
  std::uint64_t clock_ = 0;
  std::uint64_t evictions_ = 0;
  std::map<std::string, Entry> entries_;
  std::map<std::uint64_t, std::string const*> recency_;
};

/// Value stored in the feature map; monostate means not ready.
using Feature = std::variant<std::monostate, double, sketch::TopKList, std::shared_ptr<MapFeature>>;

bool ready(Feature const& f) noexcept;

/// CSV cell text: "" when not ready, shortest round-trip number, or
/// "item:freq;item:freq" for topk.  Map features render as their entry count.
std::string formatFeature(Feature const& f);

/// Feature values compare by content, map features included.
bool sameFeature(Feature const& a, Feature const& b);

} // namespace sal::engine

#endif

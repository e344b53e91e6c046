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

#ifndef SAL_ENGINE_FEATURE_MAP_HPP
#define SAL_ENGINE_FEATURE_MAP_HPP

#include <sal/engine/feature.hpp>

#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sal::engine {

/// Separator between key-field values inside a key string.
inline constexpr char kKeySeparator = '\x1f';

class FeatureMapError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/**
 * Thread-safe map from (key, featureName) to Feature.
 *
 * Feature names are fixed at construction and resolved to slots; each key
 * owns a row with one Feature per slot.  Keys are spread over lock stripes,
 * so writers to different stripes never contend.  A read after
 * updateInsert on the same pair sees that write or a later one.
 *
 * Map features are stored by reference and mutated in place by the worker
 * that owns their key; other threads may inspect them only once processing
 * has stopped.
 */
class FeatureMap {
  struct Stripe;

public:
  using Row = std::vector<Feature>;

  explicit FeatureMap(std::vector<std::string> featureNames, std::size_t stripes = 64);

  FeatureMap(FeatureMap const&) = delete;
  FeatureMap& operator=(FeatureMap const&) = delete;

  std::vector<std::string> const& featureNames() const noexcept { return names_; }
  /// Throws FeatureMapError for an unknown name.
  std::size_t slotOf(std::string_view featureName) const;

  void updateInsert(std::string const& key, std::string_view featureName, Feature f);
  void updateInsert(std::string const& key, std::size_t slot, Feature f);

  class RowRef {
  public:
    explicit operator bool() const noexcept { return row_ != nullptr; }

  private:
    friend class FeatureMap;
    Stripe* stripe_ = nullptr;
    Row* row_ = nullptr;
  };
  /// Handle to the row of `key`, created if absent.  Valid for the map's lifetime.
  RowRef locate(std::string const& key);
  void updateInsert(RowRef ref, std::size_t slot, Feature f);

  /// Not-ready (monostate) when the pair was never written.
  Feature get(std::string const& key, std::string_view featureName) const;
  Feature get(std::string const& key, std::size_t slot) const;
  /// Reads several slots of one key under a single lock.
  void read(std::string const& key, std::span<std::size_t const> slots, std::span<Feature> out) const;

  std::size_t keyCount() const;

  /// All rows ordered by key.
  std::vector<std::pair<std::string, Row>> snapshot() const;

  /**
   * Copies every ready feature of `other` into this map.  Throws
   * FeatureMapError if both maps hold a value for the same pair.
   */
  void mergeFrom(FeatureMap const& other);

  /**
   * One JSON line per ready (key, feature) pair, ordered by key and then by
   * feature name.  Key parts are listed separately.
   */
  std::string dump() const;

private:
  struct Stripe {
    mutable std::mutex mutex;
    std::unordered_map<std::string, Row> rows;
  };

  Stripe& stripeFor(std::string const& key) const;

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> slots_;
  std::unique_ptr<Stripe[]> stripes_;
  std::size_t stripeCount_;
};

/// Key string for a list of key-field values.
std::string joinKey(std::span<std::string const> parts);
std::vector<std::string> splitKey(std::string_view key);

} // namespace sal::engine

#endif

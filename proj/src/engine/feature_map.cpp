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

#include <sal/engine/feature_map.hpp>

#include <sal/sketch/hash.hpp>

#include <json.hpp>

#include <algorithm>

namespace sal::engine {

FeatureMap::FeatureMap(std::vector<std::string> featureNames, std::size_t stripes)
  : names_(std::move(featureNames))
  , stripes_(std::make_unique<Stripe[]>(stripes == 0 ? 1 : stripes))
  , stripeCount_(stripes == 0 ? 1 : stripes)
{
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!slots_.emplace(names_[i], i).second) throw FeatureMapError("duplicate feature name '" + names_[i] + "'");
  }
}

std::size_t FeatureMap::slotOf(std::string_view featureName) const
{
  auto it = slots_.find(std::string(featureName));
  if (it == slots_.end()) throw FeatureMapError("unknown feature '" + std::string(featureName) + "'");
  return it->second;
}

FeatureMap::Stripe& FeatureMap::stripeFor(std::string const& key) const
{
  return stripes_[sketch::mix64(sketch::fnv1a64(key)) % stripeCount_];
}

void FeatureMap::updateInsert(std::string const& key, std::string_view featureName, Feature f)
{
  updateInsert(key, slotOf(featureName), std::move(f));
}

void FeatureMap::updateInsert(std::string const& key, std::size_t slot, Feature f)
{
  if (slot >= names_.size()) throw FeatureMapError("feature slot out of range");
  Stripe& s = stripeFor(key);
  std::lock_guard lock(s.mutex);
  auto it = s.rows.find(key);
  if (it == s.rows.end()) it = s.rows.emplace(key, Row(names_.size())).first;
  it->second[slot] = std::move(f);
}

FeatureMap::RowRef FeatureMap::locate(std::string const& key)
{
  Stripe& s = stripeFor(key);
  std::lock_guard lock(s.mutex);
  auto it = s.rows.find(key);
  if (it == s.rows.end()) it = s.rows.emplace(key, Row(names_.size())).first;
  RowRef ref;
  ref.stripe_ = &s;
  ref.row_ = &it->second;
  return ref;
}

void FeatureMap::updateInsert(RowRef ref, std::size_t slot, Feature f)
{
  if (!ref) throw FeatureMapError("empty row handle");
  if (slot >= names_.size()) throw FeatureMapError("feature slot out of range");
  std::lock_guard lock(ref.stripe_->mutex);
  (*ref.row_)[slot] = std::move(f);
}

Feature FeatureMap::get(std::string const& key, std::string_view featureName) const
{
  return get(key, slotOf(featureName));
}

Feature FeatureMap::get(std::string const& key, std::size_t slot) const
{
  Stripe& s = stripeFor(key);
  std::lock_guard lock(s.mutex);
  auto it = s.rows.find(key);
  if (it == s.rows.end() || slot >= it->second.size()) return {};
  return it->second[slot];
}

void FeatureMap::read(std::string const& key, std::span<std::size_t const> slots, std::span<Feature> out) const
{
  Stripe& s = stripeFor(key);
  std::lock_guard lock(s.mutex);
  auto it = s.rows.find(key);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    out[i] = it == s.rows.end() ? Feature{} : it->second[slots[i]];
  }
}

std::size_t FeatureMap::keyCount() const
{
  std::size_t n = 0;
  for (std::size_t i = 0; i < stripeCount_; ++i) {
    std::lock_guard lock(stripes_[i].mutex);
    n += stripes_[i].rows.size();
  }
  return n;
}

std::vector<std::pair<std::string, FeatureMap::Row>> FeatureMap::snapshot() const
{
  std::vector<std::pair<std::string, Row>> out;
  for (std::size_t i = 0; i < stripeCount_; ++i) {
    std::lock_guard lock(stripes_[i].mutex);
    for (auto const& [key, row] : stripes_[i].rows) out.emplace_back(key, row);
  }
  std::sort(out.begin(), out.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
  return out;
}

void FeatureMap::mergeFrom(FeatureMap const& other)
{
  if (other.names_ != names_) throw FeatureMapError("cannot merge feature maps with different feature names");
  for (auto& [key, row] : other.snapshot()) {
    Stripe& s = stripeFor(key);
    std::lock_guard lock(s.mutex);
    auto it = s.rows.find(key);
    if (it == s.rows.end()) it = s.rows.emplace(key, Row(names_.size())).first;
    for (std::size_t slot = 0; slot < row.size(); ++slot) {
      if (!ready(row[slot])) continue;
      if (ready(it->second[slot])) {
        throw FeatureMapError("feature '" + names_[slot] + "' has values from two sources for one key");
      }
      it->second[slot] = row[slot];
    }
  }
}

std::vector<std::string> splitKey(std::string_view key)
{
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto sep = key.find(kKeySeparator, start);
    parts.emplace_back(key.substr(start, sep == std::string_view::npos ? std::string_view::npos : sep - start));
    if (sep == std::string_view::npos) return parts;
    start = sep + 1;
  }
}

std::string joinKey(std::span<std::string const> parts)
{
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += kKeySeparator;
    out += parts[i];
  }
  return out;
}

namespace {

nlohmann::json toJson(Feature const& f)
{
  if (auto d = std::get_if<double>(&f)) return *d;
  if (auto top = std::get_if<sketch::TopKList>(&f)) {
    auto out = nlohmann::json::array();
    for (auto const& [item, freq] : *top) out.push_back({item, freq});
    return out;
  }
  if (auto map = std::get_if<std::shared_ptr<MapFeature>>(&f)) {
    auto out = nlohmann::json::object();
    for (auto const& [key, entry] : (*map)->entries()) {
      auto values = nlohmann::json::array();
      for (auto const& v : entry.values) values.push_back(v ? nlohmann::json(*v) : nlohmann::json());
      out[key] = values;
    }
    return out;
  }
  return nullptr;
}

} // namespace

std::string FeatureMap::dump() const
{
  std::vector<std::size_t> order(names_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return names_[a] < names_[b]; });
  std::string out;
  for (auto const& [key, row] : snapshot()) {
    for (auto slot : order) {
      if (!ready(row[slot])) continue;
      nlohmann::json line{{"key", splitKey(key)}, {"feature", names_[slot]}, {"value", toJson(row[slot])}};
      out += line.dump();
      out += '\n';
    }
  }
  return out;
}

} // namespace sal::engine

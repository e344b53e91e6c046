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

#include <sal/engine/feature.hpp>

#include <sal/ast/printer.hpp>

namespace sal::engine {

MapFeature::MapFeature(std::size_t columns, std::size_t capacity)
  : columns_(columns)
  , capacity_(capacity == 0 ? 1 : capacity)
{}

void MapFeature::update(std::string const& droppedKey, Values values)
{
  auto [it, inserted] = entries_.try_emplace(droppedKey);
  if (!inserted) recency_.erase(it->second.lastTouch);
  it->second.values = std::move(values);
  it->second.lastTouch = ++clock_;
  recency_.emplace(clock_, &it->first);
  if (entries_.size() > capacity_) {
    auto oldest = recency_.begin();
    entries_.erase(*oldest->second);
    recency_.erase(oldest);
    ++evictions_;
  }
}

std::vector<double> MapFeature::column(std::size_t c) const
{
  std::vector<double> out;
  out.reserve(entries_.size());
  for (auto const& [key, entry] : entries_) {
    if (entry.values[c]) out.push_back(*entry.values[c]);
  }
  return out;
}

bool MapFeature::operator==(MapFeature const& other) const
{
  if (columns_ != other.columns_ || entries_.size() != other.entries_.size()) return false;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  for (; a != entries_.end(); ++a, ++b) {
    if (a->first != b->first || a->second.values != b->second.values) return false;
  }
  return true;
}

bool ready(Feature const& f) noexcept
{
  return !std::holds_alternative<std::monostate>(f);
}

std::string formatFeature(Feature const& f)
{
  if (auto d = std::get_if<double>(&f)) return ast::formatNumber(*d);
  if (auto top = std::get_if<sketch::TopKList>(&f)) {
    std::string out;
    for (auto const& [item, freq] : *top) {
      if (!out.empty()) out += ';';
      out += item;
      out += ':';
      out += ast::formatNumber(freq);
    }
    return out;
  }
  if (auto map = std::get_if<std::shared_ptr<MapFeature>>(&f)) return std::to_string((*map)->size());
  return {};
}

bool sameFeature(Feature const& a, Feature const& b)
{
  if (a.index() != b.index()) return false;
  if (auto ma = std::get_if<std::shared_ptr<MapFeature>>(&a)) {
    auto const& mb = std::get<std::shared_ptr<MapFeature>>(b);
    return **ma == *mb;
  }
  return a == b;
}

} // namespace sal::engine

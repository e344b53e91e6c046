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

#include <sal/sketch/topk.hpp>

#include <json.hpp>

#include <stdexcept>

namespace sal::sketch {

BasicWindowTopK::BasicWindowTopK(std::uint64_t window, std::uint64_t basicWindow, std::uint64_t k)
  : window_(window)
  , basicWindow_(basicWindow)
  , k_(k)
{
  if (window == 0 || basicWindow == 0 || basicWindow > window)
    throw std::invalid_argument("BasicWindowTopK: need 0 < b <= N");
  if (k == 0) throw std::invalid_argument("BasicWindowTopK: k must be positive");
}

void BasicWindowTopK::adjust(std::string const& item, std::int64_t delta)
{
  auto it = totals_.find(item);
  if (it == totals_.end()) it = totals_.emplace(item, 0).first;
  std::string const* key = &it->first;
  if (it->second > 0) ranking_.erase({it->second, key});
  it->second = static_cast<std::uint64_t>(static_cast<std::int64_t>(it->second) + delta);
  if (it->second > 0)
    ranking_.insert({it->second, key});
  else
    totals_.erase(it);
}

void BasicWindowTopK::insert(std::string_view item)
{
  std::string key(item);
  ++active_[key];
  ++activeItems_;
  adjust(key, 1);
  if (activeItems_ == basicWindow_) rollover();
  while (!closed_.empty() && coveredItems() - closed_.front().items >= window_) {
    for (auto const& [name, count] : closed_.front().counts) adjust(name, -static_cast<std::int64_t>(count));
    closedItems_ -= closed_.front().items;
    closed_.pop_front();
  }
}

void BasicWindowTopK::rollover()
{
  closed_.push_back(Closed{std::move(active_), activeItems_});
  closedItems_ += activeItems_;
  active_ = Counts{};
  activeItems_ = 0;
}

TopKList BasicWindowTopK::query() const
{
  TopKList out;
  double covered = static_cast<double>(coveredItems());
  for (auto it = ranking_.begin(); it != ranking_.end() && out.size() < k_; ++it)
    out.emplace_back(*it->second, static_cast<double>(it->first) / covered);
  return out;
}

double BasicWindowTopK::value(std::size_t i) const
{
  if (i >= k_ || i >= ranking_.size()) return 0.0;
  auto it = ranking_.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(i));
  return static_cast<double>(it->first) / static_cast<double>(coveredItems());
}

std::string BasicWindowTopK::dumpJson() const
{
  nlohmann::json top = nlohmann::json::array();
  for (auto const& [item, freq] : query()) top.push_back({item, freq});
  nlohmann::json j{
    {"type", "BasicWindowTopK"},
    {"window", window_},
    {"basicWindow", basicWindow_},
    {"k", k_},
    {"covered", coveredItems()},
    {"closedWindows", closed_.size()},
    {"top", top},
  };
  return j.dump();
}

} // namespace sal::sketch

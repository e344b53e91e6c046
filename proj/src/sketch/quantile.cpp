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

#include <sal/sketch/quantile.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sal::sketch {

QuantileSketch::QuantileSketch(double epsilon, std::uint64_t window, std::uint64_t basicWindow)
  : epsilon_(epsilon)
  , window_(window)
  , basicWindow_(basicWindow)
{
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("QuantileSketch: epsilon must be in [0, 1)");
  if (window == 0 || basicWindow == 0 || basicWindow > window)
    throw std::invalid_argument("QuantileSketch: need 0 < b <= N");
  auto s = static_cast<std::uint64_t>(std::floor(epsilon * static_cast<double>(basicWindow) / 2.0));
  step_ = std::max<std::uint64_t>(1, s);
}

void QuantileSketch::insert(double x)
{
  active_.insert(std::upper_bound(active_.begin(), active_.end(), x), x);
  if (active_.size() == basicWindow_) {
    Block block{{}, active_.size()};
    block.samples.reserve(active_.size() / step_ + 1);
    std::size_t n = active_.size();
    for (std::size_t i = step_; i <= n; i += step_) block.samples.push_back({active_[i - 1], step_});
    if (n % step_ != 0) block.samples.push_back({active_.back(), n % step_});
    closedItems_ += n;
    closed_.push_back(std::move(block));
    active_.clear();
    mergedValid_ = false;
  }
  while (!closed_.empty() && coveredItems() - closed_.front().items >= window_) {
    closedItems_ -= closed_.front().items;
    closed_.pop_front();
    mergedValid_ = false;
  }
}

void QuantileSketch::mergeClosed() const
{
  if (mergedValid_) return;
  merged_.clear();
  for (auto const& block : closed_) merged_.insert(merged_.end(), block.samples.begin(), block.samples.end());
  std::sort(merged_.begin(), merged_.end(), [](Sample const& a, Sample const& b) { return a.value < b.value; });
  mergedValid_ = true;
}

std::optional<double> QuantileSketch::quantileAtRank(std::uint64_t rank) const
{
  std::uint64_t total = coveredItems();
  if (total == 0) return std::nullopt;
  rank = std::clamp<std::uint64_t>(rank, 1, total);
  mergeClosed();
  std::uint64_t seen = 0;
  auto a = merged_.begin();
  auto b = active_.begin();
  while (true) {
    bool takeClosed = b == active_.end() || (a != merged_.end() && a->value <= *b);
    double v;
    if (takeClosed) {
      v = a->value;
      seen += a->weight;
      ++a;
    } else {
      v = *b;
      seen += 1;
      ++b;
    }
    if (seen >= rank) return v;
  }
}

std::optional<double> QuantileSketch::median() const
{
  std::uint64_t total = coveredItems();
  return quantileAtRank((total + 1) / 2);
}

std::size_t QuantileSketch::storedValues() const noexcept
{
  std::size_t n = active_.size();
  for (auto const& block : closed_) n += block.samples.size();
  return n;
}

std::string QuantileSketch::dumpJson() const
{
  nlohmann::json j{
    {"type", "QuantileSketch"},
    {"epsilon", epsilon_},
    {"window", window_},
    {"basicWindow", basicWindow_},
    {"step", step_},
    {"covered", coveredItems()},
    {"stored", storedValues()},
  };
  if (auto m = median()) j["median"] = *m;
  return j.dump();
}

} // namespace sal::sketch

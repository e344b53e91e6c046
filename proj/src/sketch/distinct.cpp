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

#include <sal/sketch/distinct.hpp>
#include <sal/sketch/hash.hpp>

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace sal::sketch {

HllRegisters::HllRegisters(unsigned precision)
  : precision_(precision)
{
  if (precision < 4 || precision > 18) throw std::invalid_argument("HllRegisters: precision must be in [4, 18]");
  registers_.assign(std::size_t{1} << precision, 0);
  harmonic_ = static_cast<double>(registers_.size());
  zeros_ = registers_.size();
}

std::pair<std::uint32_t, std::uint8_t> HllRegisters::split(std::uint64_t hash, unsigned precision) noexcept
{
  auto idx = static_cast<std::uint32_t>(hash >> (64 - precision));
  std::uint64_t rest = (hash << precision) | (std::uint64_t{1} << (precision - 1));
  auto rho = static_cast<std::uint8_t>(std::countl_zero(rest) + 1);
  return {idx, rho};
}

void HllRegisters::addHash(std::uint64_t hash)
{
  auto [idx, rho] = split(hash, precision_);
  update(idx, rho);
}

void HllRegisters::update(std::uint32_t idx, std::uint8_t rho)
{
  std::uint8_t& r = registers_[idx];
  if (rho <= r) return;
  if (r == 0) --zeros_;
  harmonic_ += std::ldexp(1.0, -rho) - std::ldexp(1.0, -r);
  r = rho;
}

void HllRegisters::merge(HllRegisters const& other)
{
  if (other.precision_ != precision_) throw std::invalid_argument("HllRegisters: precision mismatch");
  for (std::size_t i = 0; i < registers_.size(); ++i) registers_[i] = std::max(registers_[i], other.registers_[i]);
  harmonic_ = 0.0;
  zeros_ = 0;
  for (auto r : registers_) {
    harmonic_ += std::ldexp(1.0, -r);
    zeros_ += r == 0;
  }
}

void HllRegisters::clear()
{
  std::fill(registers_.begin(), registers_.end(), 0);
  harmonic_ = static_cast<double>(registers_.size());
  zeros_ = registers_.size();
}

double HllRegisters::estimate() const noexcept
{
  double m = static_cast<double>(registers_.size());
  double alpha = 0.7213 / (1.0 + 1.079 / m);
  double raw = alpha * m * m / harmonic_;
  if (raw <= 2.5 * m && zeros_ > 0) return m * std::log(m / static_cast<double>(zeros_));
  return raw;
}

DistinctSketch::DistinctSketch(std::uint64_t window, std::uint64_t basicWindow, unsigned precision, std::uint64_t seed)
  : window_(window)
  , basicWindow_(basicWindow)
  , seed_(seed)
  , current_(precision)
{
  if (window == 0 || basicWindow == 0 || basicWindow > window)
    throw std::invalid_argument("DistinctSketch: need 0 < b <= N");
}

void DistinctSketch::record(Block& block, std::uint32_t idx, std::uint8_t rho)
{
  if (block.dense.empty()) {
    block.sparse.push_back((idx << 8) | rho);
    if (block.sparse.size() <= current_.size() / 4) return;
    block.dense.assign(current_.size(), 0);
    for (auto e : block.sparse) {
      auto& r = block.dense[e >> 8];
      r = std::max(r, static_cast<std::uint8_t>(e & 0xff));
    }
    block.sparse.clear();
    block.sparse.shrink_to_fit();
    return;
  }
  block.dense[idx] = std::max(block.dense[idx], rho);
}

void DistinctSketch::applyTo(HllRegisters& target, Block const& block) const
{
  for (auto e : block.sparse) target.update(e >> 8, static_cast<std::uint8_t>(e & 0xff));
  for (std::size_t i = 0; i < block.dense.size(); ++i)
    if (block.dense[i] != 0) target.update(static_cast<std::uint32_t>(i), block.dense[i]);
}

void DistinctSketch::rebuild()
{
  current_.clear();
  for (auto const& block : closed_) applyTo(current_, block);
  applyTo(current_, active_);
}

void DistinctSketch::insert(std::string_view item)
{
  auto [idx, rho] = HllRegisters::split(hash64(item, seed_), current_.precision());
  record(active_, idx, rho);
  current_.update(idx, rho);
  ++activeItems_;
  if (activeItems_ == basicWindow_) {
    auto& sparse = active_.sparse;
    std::sort(sparse.begin(), sparse.end());
    // keep the largest rho per index
    auto out = sparse.begin();
    for (auto it = sparse.begin(); it != sparse.end(); ++it) {
      auto next = it + 1;
      if (next == sparse.end() || (*next >> 8) != (*it >> 8)) *out++ = *it;
    }
    sparse.erase(out, sparse.end());
    sparse.shrink_to_fit();
    active_.items = activeItems_;
    closed_.push_back(std::move(active_));
    closedItems_ += activeItems_;
    active_ = Block{};
    activeItems_ = 0;
  }
  bool expired = false;
  while (!closed_.empty() && coveredItems() - closed_.front().items >= window_) {
    closedItems_ -= closed_.front().items;
    closed_.pop_front();
    expired = true;
  }
  if (expired) rebuild();
}

double DistinctSketch::estimate() const noexcept
{
  if (coveredItems() == 0) return 0.0;
  return std::max(1.0, std::round(current_.estimate()));
}

std::string DistinctSketch::dumpJson() const
{
  nlohmann::json j{
    {"type", "DistinctSketch"},
    {"window", window_},
    {"basicWindow", basicWindow_},
    {"precision", current_.precision()},
    {"seed", seed_},
    {"covered", coveredItems()},
    {"closedWindows", closed_.size()},
    {"estimate", estimate()},
  };
  return j.dump();
}

} // namespace sal::sketch

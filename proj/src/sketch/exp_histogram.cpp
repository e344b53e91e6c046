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

#include <sal/sketch/exp_histogram.hpp>

#include <json.hpp>

#include <algorithm>
#include <stdexcept>

namespace sal::sketch {

namespace {
constexpr std::size_t kMinLimit = 32;
}

ExpHistogram::ExpHistogram(double epsilon, std::uint64_t window)
  : epsilon_(epsilon)
  , window_(window)
  , limit_(kMinLimit)
{
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("ExpHistogram: epsilon must be in [0, 1)");
  if (window == 0) throw std::invalid_argument("ExpHistogram: window must be positive");
}

void ExpHistogram::insert(double weight)
{
  if (!(weight >= 0.0)) throw std::invalid_argument("ExpHistogram: weights must be non-negative");
  ++inserted_;
  if (weight > 0.0) {
    if (buckets_.capacity() == 0) buckets_.reserve(8);
    buckets_.push_back(Bucket{inserted_, 0, weight});
    total_ += weight;
  }
  expire();
  if (bucketCount() >= limit_) compact();
}

void ExpHistogram::expire()
{
  if (inserted_ <= window_) return;
  std::uint64_t edge = inserted_ - window_;  // items with index <= edge are outside
  while (head_ < buckets_.size() && buckets_[head_].last <= edge) {
    total_ -= buckets_[head_].weight;
    oldestStart_ = buckets_[head_].last + 1;
    ++head_;
  }
  if (head_ == buckets_.size()) {
    buckets_.clear();
    head_ = 0;
    total_ = 0.0;
  } else if (head_ > 64 && head_ * 2 > buckets_.size()) {
    buckets_.erase(buckets_.begin(), buckets_.begin() + static_cast<std::ptrdiff_t>(head_));
    head_ = 0;
  }
}

void ExpHistogram::compact()
{
  std::size_t first = head_;
  if (epsilon_ > 0.0 && bucketCount() > 1) {
    // Newest to oldest; the write slot never falls below the read slot.
    double newer = 0.0;
    std::size_t w = buckets_.size();
    Bucket cur = buckets_.back();
    for (std::size_t i = buckets_.size() - 1; i-- > head_;) {
      Bucket const& older = buckets_[i];
      if (cur.weight + older.weight <= epsilon_ * newer) {
        cur.weight += older.weight;
        cur.merged = 1;
      } else {
        buckets_[--w] = cur;
        newer += cur.weight;
        cur = older;
      }
    }
    buckets_[--w] = cur;
    first = w;
  }
  buckets_.erase(buckets_.begin(), buckets_.begin() + static_cast<std::ptrdiff_t>(first));
  head_ = 0;
  total_ = 0.0;
  for (auto const& b : buckets_) total_ += b.weight;
  limit_ = std::max(kMinLimit, buckets_.size() + buckets_.size() / 2);
}

double ExpHistogram::sum() const noexcept
{
  if (head_ == buckets_.size()) return 0.0;
  double estimate = total_;
  Bucket const& oldest = buckets_[head_];
  if (oldest.merged && inserted_ > window_) {
    std::uint64_t edge = inserted_ - window_;
    if (oldestStart_ <= edge) {
      double span = static_cast<double>(oldest.last - oldestStart_ + 1);
      double expired = static_cast<double>(edge - oldestStart_ + 1);
      estimate -= oldest.weight * (expired / span);
    }
  }
  return estimate > 0.0 ? estimate : 0.0;
}

std::vector<ExpHistogram::Bucket> ExpHistogram::buckets() const
{
  return {buckets_.begin() + static_cast<std::ptrdiff_t>(head_), buckets_.end()};
}

bool ExpHistogram::invariantsHold() const
{
  if (bucketCount() > limit_) return false;
  double newer = 0.0;
  std::uint64_t previous = inserted_ + 1;
  for (std::size_t i = buckets_.size(); i-- > head_;) {
    Bucket const& b = buckets_[i];
    if (b.last >= previous) return false;
    if (!(b.weight > 0.0)) return false;
    if (b.merged && b.weight > epsilon_ * newer * (1.0 + 1e-12)) return false;
    newer += b.weight;
    previous = b.last;
  }
  return true;
}

std::string ExpHistogram::dumpJson() const
{
  nlohmann::json j{
    {"type", "ExpHistogram"},
    {"epsilon", epsilon_},
    {"window", window_},
    {"inserted", inserted_},
    {"buckets", bucketCount()},
    {"sum", sum()},
  };
  return j.dump();
}

} // namespace sal::sketch

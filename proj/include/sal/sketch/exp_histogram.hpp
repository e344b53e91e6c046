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

#ifndef SAL_SKETCH_EXP_HISTOGRAM_HPP
#define SAL_SKETCH_EXP_HISTOGRAM_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sal::sketch {

/**
 * Sum of non-negative weights over the last `window` items, with relative
 * error at most epsilon.
 *
 * Each bucket covers a contiguous run of items and stores their total weight.
 * A bucket holding more than one non-zero item satisfies
 *
 *     weight <= epsilon * (total weight of all newer buckets)
 *
 * at the moment it is formed, and newer buckets only grow afterwards.  Only
 * the oldest bucket can straddle the window edge; its in-window share is
 * estimated in proportion to the (exactly known) number of in-window items,
 * so the error is bounded by its weight and hence by epsilon times the
 * window sum.  A single-item bucket is never split by the window edge.
 *
 * Buckets are merged by a greedy newest-to-oldest pass that runs whenever the
 * bucket count reaches a limit; the limit is then reset to 1.5 times the
 * compacted size, so insertion is amortized O(1).  Zero weights only advance
 * the item counter.  epsilon == 0 disables merging (exact mode).
 */
class ExpHistogram {
public:
  struct Bucket {
    std::uint64_t last : 63;    // index of the newest item in the bucket (1-based)
    std::uint64_t merged : 1;   // holds more than one non-zero item
    double weight;
  };

  ExpHistogram(double epsilon, std::uint64_t window);

  void insert(double weight);

  /// Estimated weight of the last window() items; 0 when nothing was inserted.
  double sum() const noexcept;

  /// Exact number of items currently in the window.
  std::uint64_t itemsInWindow() const noexcept { return inserted_ < window_ ? inserted_ : window_; }
  std::uint64_t inserted() const noexcept { return inserted_; }
  std::uint64_t window() const noexcept { return window_; }
  double epsilon() const noexcept { return epsilon_; }

  std::size_t bucketCount() const noexcept { return buckets_.size() - head_; }
  std::size_t bucketLimit() const noexcept { return limit_; }
  /// Oldest first.
  std::vector<Bucket> buckets() const;

  /// Checks the merge invariant and the size limit; used by tests.
  bool invariantsHold() const;

  /// One-line JSON summary.
  std::string dumpJson() const;

private:
  void expire();
  void compact();

  double epsilon_;
  std::uint64_t window_;
  std::uint64_t inserted_ = 0;
  std::uint64_t oldestStart_ = 1;   // first item index covered by the oldest bucket
  std::vector<Bucket> buckets_;     // oldest at head_, newest at back
  std::size_t head_ = 0;
  std::size_t limit_;
  double total_ = 0.0;
};

} // namespace sal::sketch

#endif

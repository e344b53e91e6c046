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

#ifndef SAL_SKETCH_SUM_VAR_SKETCH_HPP
#define SAL_SKETCH_SUM_VAR_SKETCH_HPP

#include <sal/sketch/exp_histogram.hpp>

#include <memory>
#include <optional>
#include <string>

namespace sal::sketch {

/// Default relative error for exponential histograms.
inline constexpr double kDefaultEpsilon = 0.01;

/**
 * Sliding-window sum, mean and population variance built from exponential
 * histograms over d = x - c and d², where c is a reference shift.  Positive
 * and negative parts of d go to separate histograms so every histogram sees
 * non-negative weights.  The item count is exact.
 *
 * Moments about c avoid the cancellation in E[x²] - E[x]² when the spread is
 * small next to the mean.  c starts as the first item.  Once the window mean
 * drifts from c by more than one standard deviation a shadow sketch centred
 * on the current mean starts, and it replaces the primary after it has seen
 * a full window.  With epsilon == 0 the shift is never moved.
 *
 * Queries on an empty window return nullopt.
 */
class SumVarSketch {
public:
  SumVarSketch(double epsilon, std::uint64_t window);
  SumVarSketch(SumVarSketch const& other);
  SumVarSketch& operator=(SumVarSketch const& other);
  SumVarSketch(SumVarSketch&&) noexcept = default;
  SumVarSketch& operator=(SumVarSketch&&) noexcept = default;
  ~SumVarSketch();

  void insert(double x);

  std::uint64_t count() const noexcept { return primary_.positive.itemsInWindow(); }
  std::optional<double> sum() const;
  std::optional<double> mean() const;
  /// Clamped at 0.
  std::optional<double> variance() const;

  double shift() const noexcept { return primary_.shift; }
  bool rebasing() const noexcept { return shadow_ != nullptr; }
  std::size_t bucketCount() const noexcept;

  std::string dumpJson() const;

private:
  struct Moments {
    Moments(double epsilon, std::uint64_t window, double c);
    void insert(double x);
    double shiftedSum() const noexcept { return positive.sum() - negative.sum(); }

    double shift;
    ExpHistogram positive;
    ExpHistogram negative;
    ExpHistogram squares;
  };

  double epsilon_;
  std::uint64_t window_;
  bool started_ = false;
  Moments primary_;
  std::unique_ptr<Moments> shadow_;
};

} // namespace sal::sketch

#endif

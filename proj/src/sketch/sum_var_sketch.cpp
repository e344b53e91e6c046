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

#include <sal/sketch/sum_var_sketch.hpp>

#include <json.hpp>

namespace sal::sketch {

SumVarSketch::Moments::Moments(double epsilon, std::uint64_t window, double c)
  : shift(c)
  , positive(epsilon / 4.0, window)
  , negative(epsilon / 4.0, window)
  , squares(epsilon / 4.0, window)
{}

void SumVarSketch::Moments::insert(double x)
{
  double d = x - shift;
  positive.insert(d > 0.0 ? d : 0.0);
  negative.insert(d < 0.0 ? -d : 0.0);
  squares.insert(d * d);
}

SumVarSketch::SumVarSketch(double epsilon, std::uint64_t window)
  : epsilon_(epsilon)
  , window_(window)
  , primary_(epsilon, window, 0.0)
{}

SumVarSketch::SumVarSketch(SumVarSketch const& other)
  : epsilon_(other.epsilon_)
  , window_(other.window_)
  , started_(other.started_)
  , primary_(other.primary_)
  , shadow_(other.shadow_ ? std::make_unique<Moments>(*other.shadow_) : nullptr)
{}

SumVarSketch& SumVarSketch::operator=(SumVarSketch const& other)
{
  if (this != &other) *this = SumVarSketch(other);
  return *this;
}

SumVarSketch::~SumVarSketch() = default;

void SumVarSketch::insert(double x)
{
  if (!started_) {
    primary_.shift = x;
    started_ = true;
  }
  primary_.insert(x);
  if (shadow_) {
    shadow_->insert(x);
    if (shadow_->positive.inserted() >= window_) {
      primary_ = std::move(*shadow_);
      shadow_.reset();
    }
    return;
  }
  if (epsilon_ == 0.0) return;
  double n = static_cast<double>(count());
  double offset = primary_.shiftedSum() / n;
  double spread = primary_.squares.sum() / n - offset * offset;
  if (offset * offset > spread && offset * offset > 0.0)
    shadow_ = std::make_unique<Moments>(epsilon_, window_, primary_.shift + offset);
}

std::optional<double> SumVarSketch::sum() const
{
  if (count() == 0) return std::nullopt;
  return primary_.shift * static_cast<double>(count()) + primary_.shiftedSum();
}

std::optional<double> SumVarSketch::mean() const
{
  if (count() == 0) return std::nullopt;
  return primary_.shift + primary_.shiftedSum() / static_cast<double>(count());
}

std::optional<double> SumVarSketch::variance() const
{
  if (count() == 0) return std::nullopt;
  double n = static_cast<double>(count());
  double offset = primary_.shiftedSum() / n;
  double v = primary_.squares.sum() / n - offset * offset;
  return v > 0.0 ? v : 0.0;
}

std::size_t SumVarSketch::bucketCount() const noexcept
{
  auto of = [](Moments const& m) {
    return m.positive.bucketCount() + m.negative.bucketCount() + m.squares.bucketCount();
  };
  return of(primary_) + (shadow_ ? of(*shadow_) : 0);
}

std::string SumVarSketch::dumpJson() const
{
  nlohmann::json j{
    {"type", "SumVarSketch"},
    {"epsilon", epsilon_},
    {"window", window_},
    {"count", count()},
    {"shift", primary_.shift},
    {"rebasing", rebasing()},
    {"buckets", bucketCount()},
  };
  if (auto s = sum()) j["sum"] = *s;
  if (auto v = variance()) j["variance"] = *v;
  return j.dump();
}

} // namespace sal::sketch

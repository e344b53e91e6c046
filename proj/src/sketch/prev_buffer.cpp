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

#include <sal/sketch/prev_buffer.hpp>

#include <json.hpp>

namespace sal::sketch {

PrevBuffer::PrevBuffer(std::size_t maxPrev)
  : ring_(maxPrev + 1, 0.0)
{}

void PrevBuffer::push(double x)
{
  ring_[pushed_ % ring_.size()] = x;
  ++pushed_;
}

std::optional<double> PrevBuffer::prev(std::size_t i) const noexcept
{
  if (i >= ring_.size() || i >= pushed_) return std::nullopt;
  return ring_[(pushed_ - 1 - i) % ring_.size()];
}

std::string PrevBuffer::dumpJson() const
{
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t i = 0; i < ring_.size(); ++i)
    if (auto v = prev(i)) values.push_back(*v);
  return nlohmann::json{{"type", "PrevBuffer"}, {"depth", ring_.size()}, {"pushed", pushed_}, {"values", values}}.dump();
}

} // namespace sal::sketch

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

#ifndef SAL_SKETCH_PREV_BUFFER_HPP
#define SAL_SKETCH_PREV_BUFFER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sal::sketch {

/// Last depth values of one field; prev(0) is the newest.
class PrevBuffer {
public:
  explicit PrevBuffer(std::size_t maxPrev);

  void push(double x);

  /// Value i items back, nullopt until i + 1 values were pushed.
  std::optional<double> prev(std::size_t i) const noexcept;
  bool ready() const noexcept { return pushed_ >= ring_.size(); }
  std::uint64_t pushed() const noexcept { return pushed_; }
  std::size_t depth() const noexcept { return ring_.size(); }

  std::string dumpJson() const;

private:
  std::vector<double> ring_;
  std::uint64_t pushed_ = 0;
};

} // namespace sal::sketch

#endif

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

#ifndef SAL_CLUSTER_ENVELOPE_HPP
#define SAL_CLUSTER_ENVELOPE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sal::cluster {

/// Largest payload a frame may carry.
inline constexpr std::size_t kMaxPayload = 64 * 1024;

class FrameError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A decoded frame; an empty payload is the TERMINATE control frame.
struct Frame {
  std::string payload;
  bool terminate() const noexcept { return payload.empty(); }
};

/// Appends a 4-byte big-endian length and the payload.  Throws FrameError
/// for an empty or oversized payload.
void appendFrame(std::string& out, std::string_view payload);
void appendTerminate(std::string& out);

/// Incremental decoder for a byte stream of frames.
class FrameDecoder {
public:
  void feed(char const* data, std::size_t size);
  void feed(std::string_view bytes) { feed(bytes.data(), bytes.size()); }

  /// Next complete frame, if any.  Throws FrameError on a length over kMaxPayload.
  std::optional<Frame> next();

  /// Bytes received but not yet returned as frames.
  std::size_t buffered() const noexcept { return buffer_.size() - offset_; }

private:
  std::string buffer_;
  std::size_t offset_ = 0;
};

} // namespace sal::cluster

#endif

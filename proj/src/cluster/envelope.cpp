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

#include <sal/cluster/envelope.hpp>

namespace sal::cluster {

void appendFrame(std::string& out, std::string_view payload)
{
  if (payload.empty()) throw FrameError("data frames need a non-empty payload");
  if (payload.size() > kMaxPayload) {
    throw FrameError("payload of " + std::to_string(payload.size()) + " bytes exceeds the 64 KiB frame limit");
  }
  auto n = static_cast<std::uint32_t>(payload.size());
  out += static_cast<char>((n >> 24) & 0xff);
  out += static_cast<char>((n >> 16) & 0xff);
  out += static_cast<char>((n >> 8) & 0xff);
  out += static_cast<char>(n & 0xff);
  out += payload;
}

void appendTerminate(std::string& out)
{
  out.append(4, '\0');
}

void FrameDecoder::feed(char const* data, std::size_t size)
{
  if (offset_ > 0 && offset_ * 2 > buffer_.size()) {
    buffer_.erase(0, offset_);
    offset_ = 0;
  }
  buffer_.append(data, size);
}

std::optional<Frame> FrameDecoder::next()
{
  if (buffered() < 4) return std::nullopt;
  auto const* p = reinterpret_cast<unsigned char const*>(buffer_.data() + offset_);
  std::uint32_t n = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
  if (n > kMaxPayload) throw FrameError("frame length " + std::to_string(n) + " exceeds the 64 KiB limit");
  if (buffered() < 4 + std::size_t{n}) return std::nullopt;
  Frame f{buffer_.substr(offset_ + 4, n)};
  offset_ += 4 + n;
  if (offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  return f;
}

} // namespace sal::cluster

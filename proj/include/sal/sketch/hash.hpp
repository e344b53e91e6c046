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

#ifndef SAL_SKETCH_HASH_HPP
#define SAL_SKETCH_HASH_HPP

#include <cstdint>
#include <string_view>

namespace sal::sketch {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

/// 64-bit FNV-1a over the raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
  std::uint64_t h = kFnvOffsetBasis;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

/// MurmurHash3 64-bit finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

/// Well-mixed seeded hash for sketches that need uniform bits.
constexpr std::uint64_t hash64(std::string_view bytes, std::uint64_t seed) noexcept
{
  return mix64(fnv1a64(bytes) ^ mix64(seed + 0x9e3779b97f4a7c15ULL));
}

} // namespace sal::sketch

#endif

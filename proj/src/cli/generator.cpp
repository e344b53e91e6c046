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

#include <sal/cli/generator.hpp>

#include <sal/sketch/hash.hpp>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <stdexcept>
#include <unordered_set>

namespace sal::cli {

std::string_view toString(KeyMode mode)
{
  return mode == KeyMode::PowerLaw ? "powerlaw" : "uniform";
}

std::optional<KeyMode> parseKeyMode(std::string_view text)
{
  if (text == "powerlaw" || text == "zipf" || text == "renamed") return KeyMode::PowerLaw;
  if (text == "uniform" || text == "random" || text == "randomized") return KeyMode::Uniform;
  return std::nullopt;
}

SyntheticGenerator::SyntheticGenerator(GeneratorOptions options)
    : options_(options), rng_(options.seed * 0x9e3779b97f4a7c15ULL + options.node), time_(options.startTime)
{
  if (options_.ipPool == 0 || options_.ipPool > 65536) throw std::invalid_argument("ipPool must be in [1, 65536]");
  // Scrambled addresses: sequential names would hash to nodes in lockstep.
  addresses_.reserve(options_.ipPool);
  std::unordered_set<std::uint32_t> used;
  for (std::size_t r = 0; r < options_.ipPool; ++r) {
    std::uint64_t salt = 0;
    std::uint32_t ip = 0;
    do {
      ip = static_cast<std::uint32_t>(sketch::mix64((std::uint64_t{options_.node} << 40) ^ (salt++ << 20) ^ r));
    } while (!used.insert(ip).second || (ip >> 24) == 0);
    addresses_.push_back(std::to_string(ip >> 24) + "." + std::to_string((ip >> 16) & 255) + "." +
                         std::to_string((ip >> 8) & 255) + "." + std::to_string(ip & 255));
  }
  if (options_.keys == KeyMode::PowerLaw) {
    cdf_.resize(options_.ipPool);
    double total = 0.0;
    for (std::size_t r = 0; r < options_.ipPool; ++r) {
      total += std::pow(static_cast<double>(r + 1), -options_.zipfExponent);
      cdf_[r] = total;
    }
    for (auto& c : cdf_) c /= total;
  }
  maliciousCount_ = static_cast<std::size_t>(std::llround(options_.maliciousFraction * options_.ipPool));
}

std::string SyntheticGenerator::address(std::size_t rank) const
{
  return addresses_.at(rank);
}

bool SyntheticGenerator::isMalicious(std::size_t rank) const
{
  // The malicious addresses sit in the middle of the popularity range.
  std::size_t first = options_.ipPool / 10;
  return rank >= first && rank < first + maliciousCount_;
}

std::size_t SyntheticGenerator::drawRank()
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (options_.keys == KeyMode::Uniform) {
    return std::uniform_int_distribution<std::size_t>(0, options_.ipPool - 1)(rng_);
  }
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u(rng_));
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), options_.ipPool - 1);
}

engine::NetflowTuple SyntheticGenerator::next()
{
  engine::NetflowTuple t;
  next(t);
  return t;
}

void SyntheticGenerator::next(engine::NetflowTuple& t)
{
  static constexpr std::int64_t kServices[] = {80, 443, 53, 25, 6667, 22, 123, 8080};
  std::exponential_distribution<double> gap(1.0 / options_.meanGap);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);

  time_ += gap(rng_);
  std::size_t src = drawRank();
  std::size_t dst = drawRank();
  if (dst == src) dst = (dst + 1) % options_.ipPool;
  bool malicious = isMalicious(src);
  double shift = malicious ? options_.maliciousPayloadShift : 0.0;

  t.timeSeconds = std::round(time_ * 1000.0) / 1000.0;
  std::time_t whole = static_cast<std::time_t>(t.timeSeconds);
  std::tm tm{};
  gmtime_r(&whole, &tm);
  char date[32];
  std::strftime(date, sizeof date, "%Y/%m/%d %H:%M:%S", &tm);
  t.parseDate = date;
  double p = u(rng_);
  t.ipLayerProtocol = p < 0.8 ? "tcp" : p < 0.98 ? "udp" : "icmp";
  t.sourceIp = addresses_[src];
  t.destIp = addresses_[dst];
  t.sourcePort = 1024 + static_cast<std::int64_t>(u(rng_) * 64511.0);
  t.destPort = kServices[std::uniform_int_distribution<std::size_t>(0, std::size(kServices) - 1)(rng_)];
  t.durationSeconds = std::round(std::exp(-1.0 + 1.5 * z(rng_)) * 1e6) / 1e6;
  t.srcPayloadBytes = static_cast<std::int64_t>(std::exp(5.5 + shift + 1.5 * z(rng_)));
  t.destPayloadBytes = static_cast<std::int64_t>(std::exp(6.5 + shift + 1.8 * z(rng_)));
  t.srcPacketCount = 1 + t.srcPayloadBytes / 1000 + static_cast<std::int64_t>(u(rng_) * 4.0);
  t.destPacketCount = 1 + t.destPayloadBytes / 1000 + static_cast<std::int64_t>(u(rng_) * 4.0);
  t.srcTotalBytes = t.srcPayloadBytes + 40 * t.srcPacketCount;
  t.destTotalBytes = t.destPayloadBytes + 40 * t.destPacketCount;
  if (options_.labeled) t.label = malicious ? engine::Label::Malicious : engine::Label::Benign;
  else t.label.reset();
}

} // namespace sal::cli

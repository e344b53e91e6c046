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

#include "oracles.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace sal::testing {

double exactSum(std::span<double const> w)
{
  long double s = 0;
  for (double x : w) s += x;
  return static_cast<double>(s);
}

double exactMean(std::span<double const> w)
{
  long double s = 0;
  for (double x : w) s += x;
  return static_cast<double>(s / static_cast<long double>(w.size()));
}

double exactVariance(std::span<double const> w)
{
  long double mean = 0;
  for (double x : w) mean += x;
  mean /= static_cast<long double>(w.size());
  long double sq = 0;
  for (double x : w) sq += (x - mean) * (x - mean);
  return static_cast<double>(sq / static_cast<long double>(w.size()));
}

double exactLowerMedian(std::span<double const> w)
{
  std::vector<double> v(w.begin(), w.end());
  std::sort(v.begin(), v.end());
  return v[(v.size() + 1) / 2 - 1];
}

std::pair<std::size_t, std::size_t> rankRange(std::span<double const> w, double v)
{
  std::size_t less = 0, equal = 0;
  for (double x : w) {
    if (x < v) ++less;
    else if (x == v) ++equal;
  }
  if (equal == 0) return {less, less + 1};   // between ranks less and less+1
  return {less + 1, less + equal};
}

std::size_t rankError(std::span<double const> w, double v, std::size_t target)
{
  auto [lo, hi] = rankRange(w, v);
  if (target < lo) return lo - target;
  if (target > hi) return target - hi;
  return 0;
}

std::size_t exactDistinct(std::span<std::string const> w)
{
  return std::set<std::string>(w.begin(), w.end()).size();
}

std::map<std::string, double> exactFrequencies(std::span<std::string const> w)
{
  std::map<std::string, double> f;
  for (auto const& s : w) f[s] += 1.0;
  for (auto& [item, c] : f) c /= static_cast<double>(w.size());
  return f;
}

std::vector<std::pair<std::string, double>> exactTopK(std::span<std::string const> w, std::size_t k)
{
  auto f = exactFrequencies(w);
  std::vector<std::pair<std::string, double>> v(f.begin(), f.end());
  std::stable_sort(v.begin(), v.end(), [](auto const& a, auto const& b) { return a.second > b.second; });
  if (v.size() > k) v.resize(k);
  return v;
}

Zipf::Zipf(std::size_t n, double s) : cdf_(n)
{
  double total = 0;
  for (std::size_t r = 0; r < n; ++r) {
    total += std::pow(static_cast<double>(r + 1), -s);
    cdf_[r] = total;
  }
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

double relativeError(double estimate, double exact, double floor)
{
  return std::fabs(estimate - exact) / std::max(std::fabs(exact), floor);
}

void CollapseOracle::update(std::string const& kept, std::string const& dropped, double value)
{
  maps_[kept][dropped] = value;
}

std::map<std::string, double> const* CollapseOracle::map(std::string const& kept) const
{
  auto it = maps_.find(kept);
  return it == maps_.end() ? nullptr : &it->second;
}

double CollapseOracle::sum(std::map<std::string, double> const& m)
{
  double s = 0.0;
  for (auto const& [k, v] : m) s += v;
  return s;
}

double CollapseOracle::ave(std::map<std::string, double> const& m)
{
  return sum(m) / static_cast<double>(m.size());
}

double CollapseOracle::var(std::map<std::string, double> const& m)
{
  double mean = ave(m);
  double sq = 0.0;
  for (auto const& [k, v] : m) sq += (v - mean) * (v - mean);
  return sq / static_cast<double>(m.size());
}

double CollapseOracle::median(std::map<std::string, double> const& m)
{
  std::vector<double> v;
  for (auto const& [k, x] : m) v.push_back(x);
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

double CollapseOracle::countDistinct(std::map<std::string, double> const& m)
{
  std::set<double> s;
  for (auto const& [k, v] : m) s.insert(v);
  return static_cast<double>(s.size());
}

double numericCell(engine::NetflowTuple const& t, std::size_t column)
{
  switch (column) {
    case 0: return t.timeSeconds;
    case 5: return static_cast<double>(t.sourcePort);
    case 6: return static_cast<double>(t.destPort);
    case 7: return t.durationSeconds;
    case 8: return static_cast<double>(t.srcPayloadBytes);
    case 9: return static_cast<double>(t.destPayloadBytes);
    case 10: return static_cast<double>(t.srcTotalBytes);
    case 11: return static_cast<double>(t.destTotalBytes);
    case 12: return static_cast<double>(t.srcPacketCount);
    case 13: return static_cast<double>(t.destPacketCount);
  }
  throw std::out_of_range("not a numeric column");
}

std::string textCell(engine::NetflowTuple const& t, std::size_t column)
{
  switch (column) {
    case 1: return t.parseDate;
    case 2: return t.ipLayerProtocol;
    case 3: return t.sourceIp;
    case 4: return t.destIp;
  }
  throw std::out_of_range("not a text column");
}

std::vector<std::vector<double>> keyedOracle(std::vector<engine::NetflowTuple> const& tuples,
                                             std::vector<KeyedFeatureSpec> const& specs)
{
  std::vector<std::vector<double>> out(tuples.size(), std::vector<double>(specs.size()));
  for (std::size_t f = 0; f < specs.size(); ++f) {
    auto const& spec = specs[f];
    std::unordered_map<std::string, std::vector<double>> history;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      auto& h = history[textCell(tuples[i], spec.groupColumn)];
      h.push_back(numericCell(tuples[i], spec.fieldColumn));
      auto w = lastN(h, h.size(), spec.window);
      out[i][f] = spec.op == 'a' ? exactMean(w) : spec.op == 'v' ? exactVariance(w) : exactSum(w);
    }
  }
  return out;
}

std::optional<SplitOracle> splitOracle(std::vector<engine::NetflowTuple> const& sorted)
{
  auto isMalicious = [](engine::NetflowTuple const& t) { return t.label == engine::Label::Malicious; };
  std::optional<SplitOracle> best;
  for (std::size_t b = 1; b < sorted.size(); ++b) {
    if (!(sorted[b - 1].timeSeconds < sorted[b].timeSeconds)) continue;
    SplitOracle s;
    s.boundary = b;
    for (std::size_t i = 0; i < sorted.size(); ++i) (i < b ? s.malicious1 : s.malicious2) += isMalicious(sorted[i]);
    auto gap = [](SplitOracle const& x) {
      return x.malicious1 > x.malicious2 ? x.malicious1 - x.malicious2 : x.malicious2 - x.malicious1;
    };
    if (!best || gap(s) < gap(*best)) best = s;
  }
  return best;
}

engine::NetflowTuple randomTuple(std::mt19937_64& rng, std::size_t sources, std::size_t dests, double time)
{
  std::uniform_int_distribution<std::size_t> src(0, sources - 1), dst(0, dests - 1);
  std::uniform_int_distribution<std::int64_t> bytes(0, 5000), packets(1, 40), port(1, 65535);
  engine::NetflowTuple t;
  t.timeSeconds = time;
  t.parseDate = "2011/08/10 09:00:00";
  t.ipLayerProtocol = "tcp";
  t.sourceIp = "172.16.0." + std::to_string(src(rng));
  t.destIp = "192.168.1." + std::to_string(dst(rng));
  t.sourcePort = port(rng);
  t.destPort = port(rng) % 4 == 0 ? 80 : port(rng);
  t.durationSeconds = static_cast<double>(bytes(rng)) / 1000.0;
  t.srcPayloadBytes = bytes(rng);
  t.destPayloadBytes = bytes(rng);
  t.srcPacketCount = packets(rng);
  t.destPacketCount = packets(rng);
  t.srcTotalBytes = t.srcPayloadBytes + 40 * t.srcPacketCount;
  t.destTotalBytes = t.destPayloadBytes + 40 * t.destPacketCount;
  return t;
}

} // namespace sal::testing

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

#include <sal/cli/split.hpp>

#include <sal/ast/printer.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdlib>

namespace sal::cli {

std::string ScenarioSplit::toJson() const
{
  nlohmann::ordered_json j;
  j["split_time"] = splitTime;
  j["p1"] = {{"begin", 0}, {"end", boundary}, {"malicious", malicious1}};
  j["p2"] = {{"begin", boundary}, {"end", size}, {"malicious", malicious2}};
  return j.dump();
}

namespace {

bool malicious(engine::NetflowTuple const& t)
{
  return t.label == engine::Label::Malicious;
}

} // namespace

ScenarioSplit scenarioSplit(std::vector<engine::NetflowTuple>& tuples)
{
  auto byTime = [](auto const& a, auto const& b) { return a.timeSeconds < b.timeSeconds; };
  if (!std::is_sorted(tuples.begin(), tuples.end(), byTime)) {
    std::stable_sort(tuples.begin(), tuples.end(), byTime);
  }
  std::size_t total = static_cast<std::size_t>(std::count_if(tuples.begin(), tuples.end(), malicious));
  if (total == 0) throw SplitError("no malicious tuples: the split is undefined");
  if (total == 1) throw SplitError("a single malicious tuple cannot be balanced across two parts");

  ScenarioSplit best;
  best.size = tuples.size();
  bool found = false;
  std::size_t seen = 0;
  for (std::size_t i = 1; i < tuples.size(); ++i) {
    seen += malicious(tuples[i - 1]) ? 1 : 0;
    if (!(tuples[i - 1].timeSeconds < tuples[i].timeSeconds)) continue;
    auto diff = [&](std::size_t m) { return m * 2 > total ? m * 2 - total : total - m * 2; };
    if (!found || diff(seen) < diff(best.malicious1)) {
      best.boundary = i;
      best.malicious1 = seen;
      found = true;
    }
    if (seen * 2 >= total) break;   // later boundaries only move away from balance
  }
  if (!found) throw SplitError("all tuples share one timestamp: no temporal boundary exists");
  best.malicious2 = total - best.malicious1;
  best.splitTime = tuples[best.boundary - 1].timeSeconds;
  std::size_t gap = best.malicious1 > best.malicious2 ? best.malicious1 - best.malicious2
                                                      : best.malicious2 - best.malicious1;
  if (gap > 1) {
    throw SplitError("timestamp ties prevent a balanced split: best boundary leaves " +
                     std::to_string(best.malicious1) + " vs " + std::to_string(best.malicious2) +
                     " malicious tuples");
  }
  return best;
}

} // namespace sal::cli

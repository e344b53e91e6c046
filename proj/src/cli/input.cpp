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

#include <sal/cli/input.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

namespace sal::cli {

NetflowInput readNetflowCsv(std::istream& in, std::string const& name)
{
  NetflowInput result;
  std::string line;
  std::uint64_t lineNo = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      try {
        result.labeled = engine::checkNetflowHeader(line);
      } catch (engine::CsvError const& e) {
        throw InputError(name + ":" + std::to_string(lineNo) + ": bad header: " + e.what());
      }
      header = true;
      continue;
    }
    ++result.lines;
    try {
      result.tuples.push_back(engine::parseNetflow(line, result.labeled));
    } catch (engine::CsvError const& e) {
      ++result.malformed;
      if (result.samples.size() < 5) {
        result.samples.push_back(name + ":" + std::to_string(lineNo) + ": " + e.what());
      }
    }
  }
  if (in.bad()) throw InputError(name + ": read error");
  if (static_cast<double>(result.malformed) > kMalformedLimit * static_cast<double>(result.lines)) {
    std::string message = name + ": " + std::to_string(result.malformed) + " of " + std::to_string(result.lines) +
                          " lines are malformed (limit 1%)";
    if (!result.samples.empty()) message += "; first: " + result.samples.front();
    throw InputError(message);
  }
  return result;
}

NetflowInput readNetflowFile(std::string const& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  return readNetflowCsv(in, path);
}

void writeNetflowCsv(std::ostream& out, std::vector<engine::NetflowTuple> const& tuples, bool withLabel,
                     std::size_t begin, std::size_t end)
{
  out << engine::netflowHeader(withLabel) << '\n';
  std::string line;
  for (std::size_t i = begin; i < std::min(end, tuples.size()); ++i) {
    line.clear();
    engine::appendCsv(line, tuples[i], withLabel);
    line += '\n';
    out << line;
  }
}

} // namespace sal::cli

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

#ifndef SAL_CLI_INPUT_HPP
#define SAL_CLI_INPUT_HPP

#include <sal/engine/netflow.hpp>

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sal::cli {

/// The input failed a whole-file check (header, malformed-line threshold).
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Largest share of malformed data lines tolerated in one input.
inline constexpr double kMalformedLimit = 0.01;

struct NetflowInput {
  std::vector<engine::NetflowTuple> tuples;
  bool labeled = false;
  std::uint64_t lines = 0;        // data lines, blank lines excluded
  std::uint64_t malformed = 0;
  std::vector<std::string> samples;  // first few malformed-line messages
};

/**
 * Reads a netflow CSV with a header row.  Malformed lines are counted and
 * skipped; more than kMalformedLimit of them throws InputError, as does a
 * bad header.  An empty stream yields no tuples.
 */
NetflowInput readNetflowCsv(std::istream& in, std::string const& name = "input");
NetflowInput readNetflowFile(std::string const& path);

/// Writes the header and one line per tuple.
void writeNetflowCsv(std::ostream& out, std::vector<engine::NetflowTuple> const& tuples, bool withLabel,
                     std::size_t begin = 0, std::size_t end = static_cast<std::size_t>(-1));

} // namespace sal::cli

#endif

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

#ifndef SAL_ENGINE_NETFLOW_HPP
#define SAL_ENGINE_NETFLOW_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sal::engine {

enum class Label { Benign, Malicious, Unknown };

std::string_view toString(Label label);
std::optional<Label> parseLabel(std::string_view text);

/// A field value: numbers are doubles, strings borrow from the owning tuple.
using Cell = std::variant<double, std::string_view>;

/// One flow record, columns in netflowSchema() order plus an optional label.
struct NetflowTuple {
  double timeSeconds = 0.0;
  std::string parseDate;
  std::string ipLayerProtocol;
  std::string sourceIp;
  std::string destIp;
  std::int64_t sourcePort = 0;
  std::int64_t destPort = 0;
  double durationSeconds = 0.0;
  std::int64_t srcPayloadBytes = 0;
  std::int64_t destPayloadBytes = 0;
  std::int64_t srcTotalBytes = 0;
  std::int64_t destTotalBytes = 0;
  std::int64_t srcPacketCount = 0;
  std::int64_t destPacketCount = 0;
  std::optional<Label> label;

  static constexpr std::size_t kColumns = 14;

  /// Column i of netflowSchema().
  Cell cell(std::size_t column) const;

  bool operator==(NetflowTuple const&) const = default;
};

class CsvError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Splits one CSV line; double quotes group fields and "" is a literal quote.
std::vector<std::string_view> splitCsv(std::string_view line, std::vector<std::string>& unquoted);

/// Header line for the netflow columns, optionally with a trailing Label.
std::string netflowHeader(bool withLabel);

/**
 * Checks a header row against the netflow column order.  Returns whether a
 * Label column is present.  Throws CsvError naming the first mismatch.
 */
bool checkNetflowHeader(std::string_view line);

/// Parses one data line.  Throws CsvError on a malformed or invalid record.
NetflowTuple parseNetflow(std::string_view line, bool expectLabel);

/// Same, with a Label column iff the line has one more field than the schema.
NetflowTuple parseNetflow(std::string_view line);

/// Comma-separated columns, no trailing newline.  Text fields holding a comma,
/// quote or line break are quoted.
std::string toCsv(NetflowTuple const& tuple, bool withLabel);

/// Appends one CSV field, quoted when it holds a comma, quote or line break.
void appendCsvField(std::string& out, std::string_view text);

/// Same as toCsv, appended to out.
void appendCsv(std::string& out, NetflowTuple const& tuple, bool withLabel);

} // namespace sal::engine

#endif

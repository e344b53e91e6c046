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

#include <sal/engine/netflow.hpp>

#include <sal/ast/printer.hpp>
#include <sal/ast/schema.hpp>

#include <charconv>
#include <cmath>

namespace sal::engine {

std::string_view toString(Label label)
{
  switch (label) {
    case Label::Benign: return "benign";
    case Label::Malicious: return "malicious";
    case Label::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Label> parseLabel(std::string_view text)
{
  if (text == "benign") return Label::Benign;
  if (text == "malicious") return Label::Malicious;
  if (text == "unknown") return Label::Unknown;
  return std::nullopt;
}

Cell NetflowTuple::cell(std::size_t column) const
{
  switch (column) {
    case 0: return timeSeconds;
    case 1: return std::string_view(parseDate);
    case 2: return std::string_view(ipLayerProtocol);
    case 3: return std::string_view(sourceIp);
    case 4: return std::string_view(destIp);
    case 5: return static_cast<double>(sourcePort);
    case 6: return static_cast<double>(destPort);
    case 7: return durationSeconds;
    case 8: return static_cast<double>(srcPayloadBytes);
    case 9: return static_cast<double>(destPayloadBytes);
    case 10: return static_cast<double>(srcTotalBytes);
    case 11: return static_cast<double>(destTotalBytes);
    case 12: return static_cast<double>(srcPacketCount);
    case 13: return static_cast<double>(destPacketCount);
  }
  throw std::out_of_range("netflow column " + std::to_string(column));
}

std::vector<std::string_view> splitCsv(std::string_view line, std::vector<std::string>& unquoted)
{
  std::vector<std::string_view> fields;
  unquoted.clear();
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.find('"') == std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        fields.push_back(line.substr(start));
        return fields;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
  }
  // Quoted fields are rare; their unescaped text lives in `unquoted`.
  unquoted.reserve(line.size() + 1);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::string buffer;
  std::size_t i = 0;
  while (true) {
    std::string field;
    if (i < line.size() && line[i] == '"') {
      ++i;
      while (true) {
        if (i >= line.size()) throw CsvError("unterminated quoted field");
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        field += line[i++];
      }
      if (i < line.size() && line[i] != ',') throw CsvError("text after closing quote");
    } else {
      while (i < line.size() && line[i] != ',') field += line[i++];
    }
    spans.emplace_back(buffer.size(), field.size());
    buffer += field;
    if (i >= line.size()) break;
    ++i;
  }
  unquoted.push_back(std::move(buffer));
  std::string_view all = unquoted.back();
  for (auto [offset, length] : spans) fields.push_back(all.substr(offset, length));
  return fields;
}

std::string netflowHeader(bool withLabel)
{
  std::string out;
  for (auto const& column : ast::netflowSchema().columns()) {
    if (!out.empty()) out += ',';
    out += column.name;
  }
  if (withLabel) out += ",Label";
  return out;
}

bool checkNetflowHeader(std::string_view line)
{
  std::vector<std::string> scratch;
  auto fields = splitCsv(line, scratch);
  auto const& columns = ast::netflowSchema().columns();
  if (fields.size() != columns.size() && fields.size() != columns.size() + 1) {
    throw CsvError("header has " + std::to_string(fields.size()) + " columns, expected " +
                   std::to_string(columns.size()) + " (plus optional Label)");
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (fields[i] != columns[i].name) {
      throw CsvError("header column " + std::to_string(i + 1) + " is '" + std::string(fields[i]) +
                     "', expected '" + columns[i].name + "'");
    }
  }
  if (fields.size() == columns.size() + 1) {
    if (fields.back() != "Label") {
      throw CsvError("trailing header column is '" + std::string(fields.back()) + "', expected 'Label'");
    }
    return true;
  }
  return false;
}

namespace {

double parseDouble(std::string_view text, std::string_view column)
{
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw CsvError("column " + std::string(column) + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

std::int64_t parseCount(std::string_view text, std::string_view column)
{
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    double d = parseDouble(text, column);
    if (d != std::floor(d) || std::fabs(d) > 9.0e15) {
      throw CsvError("column " + std::string(column) + ": '" + std::string(text) + "' is not an integer");
    }
    value = static_cast<std::int64_t>(d);
  }
  return value;
}

std::int64_t parseNonNegative(std::string_view text, std::string_view column)
{
  auto value = parseCount(text, column);
  if (value < 0) throw CsvError("column " + std::string(column) + " must be non-negative");
  return value;
}

} // namespace

namespace {

NetflowTuple parseFields(std::vector<std::string_view> const& f, bool expectLabel)
{
  std::size_t expected = NetflowTuple::kColumns + (expectLabel ? 1 : 0);
  if (f.size() != expected) {
    throw CsvError("expected " + std::to_string(expected) + " columns, found " + std::to_string(f.size()));
  }
  NetflowTuple t;
  t.timeSeconds = parseDouble(f[0], "TimeSeconds");
  t.parseDate = f[1];
  t.ipLayerProtocol = f[2];
  t.sourceIp = f[3];
  t.destIp = f[4];
  if (t.sourceIp.empty() || t.destIp.empty()) throw CsvError("IP address columns must be non-empty");
  t.sourcePort = parseCount(f[5], "SourcePort");
  t.destPort = parseCount(f[6], "DestPort");
  t.durationSeconds = parseDouble(f[7], "DurationSeconds");
  if (t.durationSeconds < 0.0) throw CsvError("column DurationSeconds must be non-negative");
  t.srcPayloadBytes = parseNonNegative(f[8], "SrcPayloadBytes");
  t.destPayloadBytes = parseNonNegative(f[9], "DestPayloadBytes");
  t.srcTotalBytes = parseNonNegative(f[10], "SrcTotalBytes");
  t.destTotalBytes = parseNonNegative(f[11], "DestTotalBytes");
  t.srcPacketCount = parseNonNegative(f[12], "SrcPacketCount");
  t.destPacketCount = parseNonNegative(f[13], "DestPacketCount");
  if (expectLabel) {
    auto label = parseLabel(f[14]);
    if (!label && !f[14].empty()) {
      throw CsvError("unknown label '" + std::string(f[14]) + "' (expected benign, malicious or unknown)");
    }
    t.label = label;
  }
  return t;
}

} // namespace

NetflowTuple parseNetflow(std::string_view line, bool expectLabel)
{
  std::vector<std::string> scratch;
  return parseFields(splitCsv(line, scratch), expectLabel);
}

NetflowTuple parseNetflow(std::string_view line)
{
  std::vector<std::string> scratch;
  auto fields = splitCsv(line, scratch);
  return parseFields(fields, fields.size() == NetflowTuple::kColumns + 1);
}

void appendCsvField(std::string& out, std::string_view text)
{
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
    out += text;
    return;
  }
  out += '"';
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void appendCsv(std::string& out, NetflowTuple const& t, bool withLabel)
{
  auto number = [&](double v) { out += ast::formatNumber(v); };
  auto integer = [&](std::int64_t v) {
    char buf[24];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
  };
  number(t.timeSeconds);
  out += ',';
  appendCsvField(out, t.parseDate);
  out += ',';
  appendCsvField(out, t.ipLayerProtocol);
  out += ',';
  appendCsvField(out, t.sourceIp);
  out += ',';
  appendCsvField(out, t.destIp);
  for (auto v : {t.sourcePort, t.destPort}) {
    out += ',';
    integer(v);
  }
  out += ',';
  number(t.durationSeconds);
  for (auto v : {t.srcPayloadBytes, t.destPayloadBytes, t.srcTotalBytes, t.destTotalBytes, t.srcPacketCount,
                 t.destPacketCount}) {
    out += ',';
    integer(v);
  }
  if (withLabel) {
    out += ',';
    if (t.label) out += toString(*t.label);
  }
}

std::string toCsv(NetflowTuple const& tuple, bool withLabel)
{
  std::string out;
  appendCsv(out, tuple, withLabel);
  return out;
}

} // namespace sal::engine

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

#ifndef SAL_CLI_GENERATOR_HPP
#define SAL_CLI_GENERATOR_HPP

#include <sal/engine/netflow.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace sal::cli {

/// How IP addresses are drawn from a node's address pool.
enum class KeyMode {
  PowerLaw,  // Zipf over the pool, like renamed real traffic
  Uniform,   // every address equally likely
};

std::string_view toString(KeyMode mode);
std::optional<KeyMode> parseKeyMode(std::string_view text);

struct GeneratorOptions {
  KeyMode keys = KeyMode::PowerLaw;
  std::uint64_t seed = 1;
  std::size_t node = 0;              // address namespace
  std::size_t ipPool = 10000;        // distinct addresses per namespace
  double zipfExponent = 1.2;
  bool labeled = false;
  double maliciousFraction = 0.0;    // share of source addresses that are malicious
  double maliciousPayloadShift = 0.0; // added to the log-mean of their payload sizes
  double startTime = 1313000000.0;
  double meanGap = 0.001;            // seconds between flows
};

/**
 * Synthetic netflow records.  Byte and duration fields are log-normal;
 * packet counts follow from payload sizes.  The sequence depends only on
 * the options.
 */
class SyntheticGenerator {
public:
  explicit SyntheticGenerator(GeneratorOptions options);

  engine::NetflowTuple next();
  void next(engine::NetflowTuple& out);

  GeneratorOptions const& options() const noexcept { return options_; }

  /// Address string of pool rank r.
  std::string address(std::size_t rank) const;
  bool isMalicious(std::size_t rank) const;

private:
  std::size_t drawRank();

  GeneratorOptions options_;
  std::mt19937_64 rng_;
  std::vector<double> cdf_;          // power-law mode
  std::vector<std::string> addresses_;
  std::size_t maliciousCount_ = 0;
  double time_;
};

} // namespace sal::cli

#endif

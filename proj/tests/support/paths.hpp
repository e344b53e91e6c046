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

#ifndef SAL_TESTS_PATHS_HPP
#define SAL_TESTS_PATHS_HPP

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sal::testing {

inline std::string dataPath(std::string const& name)
{
  return std::string(SAL_TEST_DATA_DIR) + "/" + name;
}

inline std::string readText(std::string const& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace sal::testing

#endif

// Copyright 2026 The wtan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WTAN_SRC_JSON_IO_HPP_
#define WTAN_SRC_JSON_IO_HPP_

#include <string>

#include "json.hpp"
#include "wtan/path_ensemble.hpp"
#include "wtan/tangent.hpp"
#include "wtan/transport.hpp"

namespace wtan::detail {

using Json = nlohmann::ordered_json;

// `where` prefixes diagnostics, e.g. "fibers[2]".
Json to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from(const Json& j, const std::string& where, double merge = kDefaultMergeTolerance);
Json to_json(const Coupling& gamma);
Coupling coupling_from(const Json& j, const std::string& where, double merge = kDefaultMergeTolerance);
Json to_json(const TangentElement& t);
TangentElement tangent_from(const Json& j, const std::string& where, double merge = kDefaultMergeTolerance);
Json to_json(const PathEnsemble& e);
PathEnsemble ensemble_from(const Json& j, const std::string& where, double velocity_tolerance);

// Parses text, turning syntax errors into kParse with line and column.
Json parse_json(const std::string& text);

double number_at(const Json& j, const char* key, const std::string& where);
double number_or(const Json& j, const char* key, double fallback, const std::string& where);

}  // namespace wtan::detail

#endif  // WTAN_SRC_JSON_IO_HPP_

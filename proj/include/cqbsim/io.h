// Copyright 2026 The cqbsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CQBSIM_IO_H
#define CQBSIM_IO_H

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace cqbsim {

using Json = nlohmann::ordered_json;

/// Scientific notation with 12 significant digits; every float in every output goes
/// through here.
std::string fmt(double x);

/// Deep copy of `j` with every floating-point number replaced by its fmt() string
/// form re-parsed as a number, so dumps are stable across platforms.
std::string dump_json(const Json &j);

/// Writes rows of numbers under a header line.
void write_csv(const std::string &path, const std::vector<std::string> &header,
               const std::vector<std::vector<double>> &rows);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::string &path);

void write_text(const std::string &path, const std::string &text);
std::string read_text(const std::string &path);
Json read_json(const std::string &path);

/// 64-bit FNV-1a.
uint64_t fnv1a64(const std::string &bytes);
std::string hex64(uint64_t x);

}  // namespace cqbsim

#endif

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

#include "cqbsim/io.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cqbsim/errors.h"

namespace cqbsim {

std::string fmt(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (x == 0) {
        x = 0;  // drop the sign of negative zero
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.11e", x);
    return buf;
}

static void dump_into(const Json &j, std::string &out, int indent) {
    std::string pad(indent + 2, ' ');
    std::string close_pad(indent, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ",\n";
                }
                first = false;
                out += pad + Json(it.key()).dump() + ": ";
                dump_into(it.value(), out, indent + 2);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            bool first = true;
            for (const auto &v : j) {
                if (!first) {
                    out += ", ";
                }
                first = false;
                dump_into(v, out, indent + 2);
            }
            out += "]";
            return;
        }
        case Json::value_t::number_float: {
            double x = j.get<double>();
            if (!std::isfinite(x)) {
                out += "null";
            } else {
                out += fmt(x);
            }
            return;
        }
        default:
            out += j.dump();
    }
}

std::string dump_json(const Json &j) {
    std::string out;
    dump_into(j, out, 0);
    out += "\n";
    return out;
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot open for writing: " + path, "out");
    }
    f << text;
}

std::string read_text(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot open: " + path, "path");
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Json read_json(const std::string &path) {
    try {
        return Json::parse(read_text(path));
    } catch (const Json::parse_error &e) {
        throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what(), "path");
    }
}

void write_csv(const std::string &path, const std::vector<std::string> &header,
               const std::vector<std::vector<double>> &rows) {
    std::string out;
    for (size_t k = 0; k < header.size(); k++) {
        out += (k ? "," : "") + header[k];
    }
    out += "\n";
    for (const auto &row : rows) {
        for (size_t k = 0; k < row.size(); k++) {
            if (k) {
                out += ",";
            }
            out += fmt(row[k]);
        }
        out += "\n";
    }
    write_text(path, out);
}

CsvTable read_csv(const std::string &path) {
    std::istringstream in(read_text(path));
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("empty CSV: " + path, "path");
    }
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
        t.header.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::istringstream rs(line);
        while (std::getline(rs, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception &) {
                throw ConfigError("non-numeric CSV cell '" + cell + "' in " + path, "path");
            }
        }
        if (row.size() != t.header.size()) {
            throw ConfigError("ragged CSV row in " + path, "path");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

uint64_t fnv1a64(const std::string &bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t x) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

}  // namespace cqbsim

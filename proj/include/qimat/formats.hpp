#pragma once

#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "qimat/genwords.hpp"
#include "qimat/matrices.hpp"

namespace qimat::formats {

/// b-file emission, line-exact: "index SP value LF", indices ascending from 1.
inline std::string to_bfile(const genwords::CountTable& table) {
    std::string out;
    for (std::uint64_t n = 1; n <= table.limit(); ++n) {
        out += std::to_string(n);
        out += ' ';
        out += table.at(n).get_str();
        out += '\n';
    }
    return out;
}

/// Tab-separated "n value" rows.
inline std::string to_table_text(const genwords::CountTable& table) {
    std::string out;
    for (std::uint64_t n = 1; n <= table.limit(); ++n) {
        out += std::to_string(n);
        out += '\t';
        out += table.at(n).get_str();
        out += '\n';
    }
    return out;
}

/// Values as decimal strings (precision-safe for downstream consumers).
inline nlohmann::json to_json(const genwords::CountTable& table) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::uint64_t n = 1; n <= table.limit(); ++n) arr.push_back(table.at(n).get_str());
    return arr;
}

/// Word rendering "v1^w1 v2^w2 ...".
inline std::string word_to_text(const genwords::GenWord& word) {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i > 0) out += ' ';
        out += std::to_string(word[i].v);
        out += '^';
        out += std::to_string(word[i].w);
    }
    return out;
}

inline nlohmann::json word_to_json(const genwords::GenWord& word) {
    nlohmann::json arr = nlohmann::json::array();
    for (const genwords::WordPair& p : word) arr.push_back({p.v, p.w});
    return arr;
}

/// Plain-text matrix: first line the dimension, then one row per line.
inline std::string matrix_to_text(const matrices::IntMatrix& a) {
    std::string out = std::to_string(a.dim());
    out += '\n';
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            if (j > 0) out += ' ';
            out += std::to_string(a.at(i, j));
        }
        out += '\n';
    }
    return out;
}

/// Matrix as an array of arrays of decimal strings.
inline nlohmann::json matrix_to_json(const matrices::IntMatrix& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < a.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < a.dim(); ++j) row.push_back(std::to_string(a.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

struct BfileEntry {
    std::uint64_t index = 0;
    mpz_class value;
};

/// Parse an OEIS-style b-file: optional "#" comment lines, otherwise
/// "index value" per line. Malformed lines or an entry-free file throw.
inline std::vector<BfileEntry> parse_bfile(std::istream& in) {
    std::vector<BfileEntry> entries;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::istringstream fields(line.substr(start));
        std::string index_text, value_text, extra;
        fields >> index_text >> value_text;
        if (value_text.empty() || (fields >> extra))
            throw std::runtime_error("b-file line " + std::to_string(line_no) +
                                     ": expected \"index value\"");
        BfileEntry entry;
        try {
            std::size_t used = 0;
            const long long idx = std::stoll(index_text, &used);
            if (used != index_text.size() || idx < 0) throw std::invalid_argument("index");
            entry.index = static_cast<std::uint64_t>(idx);
        } catch (const std::exception&) {
            throw std::runtime_error("b-file line " + std::to_string(line_no) +
                                     ": bad index \"" + index_text + "\"");
        }
        if (entry.value.set_str(value_text, 10) != 0)
            throw std::runtime_error("b-file line " + std::to_string(line_no) +
                                     ": bad value \"" + value_text + "\"");
        entries.push_back(std::move(entry));
    }
    if (entries.empty()) throw std::runtime_error("b-file contains no entries");
    return entries;
}

} // namespace qimat::formats

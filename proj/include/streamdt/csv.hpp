#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "streamdt/schema.hpp"

namespace streamdt {

struct Dataset {
    Schema schema;
    std::vector<Instance> instances;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

inline std::optional<double> parse_double(const std::string& text) {
    if (text.empty()) return std::nullopt;
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

inline std::vector<std::vector<std::string>> read_csv_cells(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open '" + path.string() + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && rows.empty()) continue;  // tolerate leading blank lines
        if (line.empty()) break;                     // stop at a trailing blank line
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw std::runtime_error("csv: '" + path.string() + "' is empty");
    if (rows.size() < 2)
        throw std::runtime_error("csv: '" + path.string() + "' has a header but no data rows");
    const std::size_t width = rows.front().size();
    if (width < 2) throw std::runtime_error("csv: need at least one attribute column and a class column");
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != width)
            throw std::runtime_error("csv: ragged row " + std::to_string(r + 1) + " (expected " +
                                     std::to_string(width) + " cells)");
    return rows;
}

constexpr const char* kNominalTag = ":nominal";

inline bool strip_nominal_tag(std::string& name) {
    const std::string tag = kNominalTag;
    if (name.size() > tag.size() && name.compare(name.size() - tag.size(), tag.size(), tag) == 0) {
        name.erase(name.size() - tag.size());
        return true;
    }
    return false;
}

}  // namespace detail

/// Loads a CSV stream, inferring the schema: the first row names the
/// attributes, the last column is the class, and a column is nominal iff any
/// value fails to parse as a number or the header carries a `:nominal` tag.
/// Nominal values and class labels are indexed by first appearance.
inline Dataset load_csv(const std::filesystem::path& path) {
    const auto rows = detail::read_csv_cells(path);
    const std::size_t width = rows.front().size();
    const std::size_t attr_count = width - 1;

    std::vector<std::string> names(attr_count);
    std::vector<bool> nominal(attr_count, false);
    for (std::size_t i = 0; i < attr_count; ++i) {
        names[i] = rows.front()[i];
        nominal[i] = detail::strip_nominal_tag(names[i]);
    }
    for (std::size_t i = 0; i < attr_count; ++i) {
        if (nominal[i]) continue;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (!detail::parse_double(rows[r][i])) {
                nominal[i] = true;
                break;
            }
        }
    }

    Dataset out;
    std::vector<std::unordered_map<std::string, int>> value_index(attr_count);
    std::unordered_map<std::string, int> class_index;
    for (std::size_t i = 0; i < attr_count; ++i) {
        if (nominal[i])
            out.schema.attributes.push_back(AttributeSpec::nominal(names[i], std::vector<std::string>{}));
        else
            out.schema.attributes.push_back(AttributeSpec::numeric(names[i]));
    }

    out.instances.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        Instance x;
        x.values.resize(attr_count);
        for (std::size_t i = 0; i < attr_count; ++i) {
            const std::string& cell = rows[r][i];
            if (nominal[i]) {
                auto [it, inserted] = value_index[i].try_emplace(
                    cell, static_cast<int>(out.schema.attributes[i].values.size()));
                if (inserted) out.schema.attributes[i].values.push_back(cell);
                x.values[i] = static_cast<double>(it->second);
            } else {
                x.values[i] = *detail::parse_double(cell);
            }
        }
        const std::string& label_cell = rows[r][width - 1];
        auto [it, inserted] =
            class_index.try_emplace(label_cell, static_cast<int>(out.schema.class_names.size()));
        if (inserted) out.schema.class_names.push_back(label_cell);
        x.label = it->second;
        out.instances.push_back(std::move(x));
    }
    out.schema.class_count = static_cast<int>(out.schema.class_names.size());

    try {
        out.schema.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("csv: '" + path.string() + "' yields an invalid schema: " + e.what());
    }
    return out;
}

/// Loads a CSV against a known schema; value names and class labels must match
/// the schema's, and unknown values are load errors. Header attribute names
/// must match in order.
inline std::vector<Instance> load_csv(const std::filesystem::path& path, const Schema& schema) {
    const auto rows = detail::read_csv_cells(path);
    const std::size_t width = rows.front().size();
    if (width != schema.attributes.size() + 1)
        throw std::runtime_error("csv: column count does not match the schema");
    for (std::size_t i = 0; i < schema.attributes.size(); ++i) {
        std::string name = rows.front()[i];
        detail::strip_nominal_tag(name);
        if (name != schema.attributes[i].name)
            throw std::runtime_error("csv: header column '" + name + "' does not match attribute '" +
                                     schema.attributes[i].name + "'");
    }

    std::vector<std::unordered_map<std::string, int>> value_index(schema.attributes.size());
    for (std::size_t i = 0; i < schema.attributes.size(); ++i)
        for (int v = 0; v < schema.attributes[i].value_count(); ++v)
            value_index[i].emplace(schema.attributes[i].values[static_cast<std::size_t>(v)], v);
    std::unordered_map<std::string, int> class_index;
    for (int k = 0; k < schema.class_count; ++k)
        class_index.emplace(schema.class_names[static_cast<std::size_t>(k)], k);

    std::vector<Instance> instances;
    instances.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        Instance x;
        x.values.resize(schema.attributes.size());
        for (std::size_t i = 0; i < schema.attributes.size(); ++i) {
            const std::string& cell = rows[r][i];
            if (schema.attributes[i].is_nominal()) {
                auto it = value_index[i].find(cell);
                if (it == value_index[i].end())
                    throw std::runtime_error("csv: unknown value '" + cell + "' for attribute '" +
                                             schema.attributes[i].name + "' on row " +
                                             std::to_string(r + 1));
                x.values[i] = static_cast<double>(it->second);
            } else {
                const auto value = detail::parse_double(cell);
                if (!value)
                    throw std::runtime_error("csv: non-numeric cell '" + cell + "' for attribute '" +
                                             schema.attributes[i].name + "' on row " +
                                             std::to_string(r + 1));
                x.values[i] = *value;
            }
        }
        auto it = class_index.find(rows[r][width - 1]);
        if (it == class_index.end())
            throw std::runtime_error("csv: unknown class label '" + rows[r][width - 1] + "' on row " +
                                     std::to_string(r + 1));
        x.label = it->second;
        instances.push_back(std::move(x));
    }
    return instances;
}

/// Writes instances in the same dialect load_csv reads: header row with
/// `:nominal` tags, nominal cells as value names, numerics with full
/// round-trip precision, class names in the last column.
inline void write_csv(std::ostream& os, const Schema& schema, std::span<const Instance> instances) {
    for (const AttributeSpec& a : schema.attributes) {
        os << a.name;
        if (a.is_nominal()) os << detail::kNominalTag;
        os << ',';
    }
    os << "class\n";
    char buffer[32];
    for (const Instance& x : instances) {
        for (std::size_t i = 0; i < schema.attributes.size(); ++i) {
            const AttributeSpec& a = schema.attributes[i];
            if (a.is_nominal()) {
                os << a.values[static_cast<std::size_t>(nominal_value(x, static_cast<int>(i)))];
            } else {
                std::snprintf(buffer, sizeof(buffer), "%.17g", x.values[i]);
                os << buffer;
            }
            os << ',';
        }
        os << schema.class_names[static_cast<std::size_t>(x.label)] << '\n';
    }
}

inline void write_csv(const std::filesystem::path& path, const Schema& schema,
                      std::span<const Instance> instances) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write '" + path.string() + "'");
    write_csv(out, schema, instances);
    if (!out) throw std::runtime_error("csv: write to '" + path.string() + "' failed");
}

}  // namespace streamdt

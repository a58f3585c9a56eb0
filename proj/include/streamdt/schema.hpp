#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace streamdt {

enum class AttributeKind { nominal, numeric };

struct AttributeSpec {
    std::string name;
    AttributeKind kind = AttributeKind::nominal;
    std::vector<std::string> values;  // nominal value names; index is the stored value

    bool is_nominal() const { return kind == AttributeKind::nominal; }
    int value_count() const { return static_cast<int>(values.size()); }

    static AttributeSpec nominal(std::string name, std::vector<std::string> value_names) {
        AttributeSpec a;
        a.name = std::move(name);
        a.kind = AttributeKind::nominal;
        a.values = std::move(value_names);
        return a;
    }

    static AttributeSpec nominal(std::string name, int value_count) {
        std::vector<std::string> names;
        names.reserve(static_cast<std::size_t>(value_count));
        for (int v = 0; v < value_count; ++v) names.push_back("v" + std::to_string(v));
        return nominal(std::move(name), std::move(names));
    }

    static AttributeSpec numeric(std::string name) {
        AttributeSpec a;
        a.name = std::move(name);
        a.kind = AttributeKind::numeric;
        return a;
    }
};

/// Attribute declarations plus the class variable. Plain value type; validate()
/// throws std::invalid_argument on a malformed schema.
struct Schema {
    std::vector<AttributeSpec> attributes;
    int class_count = 0;
    std::vector<std::string> class_names;

    int attribute_count() const { return static_cast<int>(attributes.size()); }

    bool all_nominal() const {
        for (const auto& a : attributes)
            if (!a.is_nominal()) return false;
        return true;
    }

    void validate() const {
        if (class_count < 2) throw std::invalid_argument("schema: class_count must be at least 2");
        if (class_names.size() != static_cast<std::size_t>(class_count))
            throw std::invalid_argument("schema: class_names must have class_count entries");
        std::unordered_set<std::string> seen;
        for (const auto& a : attributes) {
            if (a.name.empty()) throw std::invalid_argument("schema: attribute names must be nonempty");
            if (!seen.insert(a.name).second)
                throw std::invalid_argument("schema: duplicate attribute name '" + a.name + "'");
            if (a.is_nominal()) {
                if (a.value_count() < 2)
                    throw std::invalid_argument("schema: nominal attribute '" + a.name +
                                                "' needs at least 2 values");
                std::unordered_set<std::string> vals(a.values.begin(), a.values.end());
                if (vals.size() != a.values.size())
                    throw std::invalid_argument("schema: duplicate value name in attribute '" + a.name + "'");
            }
        }
    }
};

/// Schema with `attrs` nominal attributes of `values` values each, named
/// a0..aN / v0..vM / c0..cK.
inline Schema make_nominal_schema(int attrs, int values, int classes) {
    Schema s;
    s.attributes.reserve(static_cast<std::size_t>(attrs));
    for (int i = 0; i < attrs; ++i)
        s.attributes.push_back(AttributeSpec::nominal("a" + std::to_string(i), values));
    s.class_count = classes;
    for (int k = 0; k < classes; ++k) s.class_names.push_back("c" + std::to_string(k));
    s.validate();
    return s;
}

/// One labeled observation. Nominal attribute values are stored as their index.
struct Instance {
    std::vector<double> values;
    int label = 0;
};

inline int nominal_value(const Instance& x, int attr) {
    return static_cast<int>(x.values[static_cast<std::size_t>(attr)]);
}

inline void validate_instance(const Instance& x, const Schema& schema) {
    if (x.values.size() != static_cast<std::size_t>(schema.attribute_count()))
        throw std::invalid_argument("instance: wrong number of attribute values");
    if (x.label < 0 || x.label >= schema.class_count)
        throw std::out_of_range("instance: label out of range");
    for (int i = 0; i < schema.attribute_count(); ++i) {
        const AttributeSpec& a = schema.attributes[static_cast<std::size_t>(i)];
        if (a.is_nominal()) {
            const int v = nominal_value(x, i);
            if (v < 0 || v >= a.value_count())
                throw std::out_of_range("instance: value out of range for attribute '" + a.name + "'");
        } else if (!std::isfinite(x.values[static_cast<std::size_t>(i)])) {
            throw std::invalid_argument("instance: non-finite reading for attribute '" + a.name + "'");
        }
    }
}

}  // namespace streamdt

#pragma once

// Domain types shared by every part of the fee-market library: resource and
// price vectors, one block's market data, and the per-block trace record.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace feemarket {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown whenever two vectors or a vector and an instance disagree on the
/// number of resources. Dimensions are never broadcast.
class DimensionError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Dense m-vector of doubles tagged with its role so that prices, resource
/// quantities and gradients cannot be mixed up by accident.
template <typename Tag>
class TaggedVector {
public:
    TaggedVector() = default;
    explicit TaggedVector(std::size_t m, double fill = 0.0) : values_(m, fill) {}
    explicit TaggedVector(std::vector<double> values) : values_(std::move(values)) {}
    TaggedVector(std::initializer_list<double> values) : values_(values) {}

    template <typename OtherTag>
    static TaggedVector from(const TaggedVector<OtherTag>& other) {
        return TaggedVector(other.values());
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::vector<double>& values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> span() const noexcept { return values_; }
    [[nodiscard]] std::span<double> span() noexcept { return values_; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }
    auto begin() noexcept { return values_.begin(); }
    auto end() noexcept { return values_.end(); }

    friend bool operator==(const TaggedVector&, const TaggedVector&) = default;

private:
    std::vector<double> values_;
};

struct ResourceTag {};
struct PriceTag {};
struct GradientTag {};

using ResourceVector = TaggedVector<ResourceTag>;
using PriceVector = TaggedVector<PriceTag>;
using GradientVector = TaggedVector<GradientTag>;

inline void require_same_dimension(std::size_t expected, std::size_t actual,
                                   const char* what) {
    if (expected != actual) {
        throw DimensionError(std::string(what) + ": expected dimension " +
                             std::to_string(expected) + ", got " +
                             std::to_string(actual));
    }
}

namespace vec {

inline double dot(std::span<const double> a, std::span<const double> b) {
    require_same_dimension(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

inline double norm_inf(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

inline double norm1(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += std::abs(v);
    return s;
}

inline bool all_finite(std::span<const double> a) {
    for (double v : a) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

inline bool all_nonnegative(std::span<const double> a) {
    for (double v : a) {
        if (!(v >= 0.0)) return false;
    }
    return true;
}

}  // namespace vec

/// Checks the invariants of a usage/limit/target vector.
inline void require_resource_vector(const ResourceVector& v, const char* what) {
    if (!vec::all_finite(v.span())) throw InvalidArgument(std::string(what) + ": non-finite entry");
    if (!vec::all_nonnegative(v.span())) throw InvalidArgument(std::string(what) + ": negative entry");
}

inline void require_finite(std::span<const double> v, const char* what) {
    if (!vec::all_finite(v)) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

/// One block's market: n transactions with welfare q_j, consumption columns
/// a_j (stored row-major by resource), the per-block cap b and pairwise
/// exclusions. An exclusion (j, k) forbids including both j and k; the
/// relation is read as unordered, so listing one orientation is enough.
struct BlockInstance {
    std::vector<double> welfare;
    std::vector<std::vector<double>> consumption;  // m rows of length n
    ResourceVector limit;
    std::vector<std::pair<std::size_t, std::size_t>> exclusions;

    [[nodiscard]] std::size_t resources() const noexcept { return limit.size(); }
    [[nodiscard]] std::size_t transactions() const noexcept { return welfare.size(); }
    [[nodiscard]] double usage_of(std::size_t resource, std::size_t tx) const {
        return consumption[resource][tx];
    }

    friend bool operator==(const BlockInstance&, const BlockInstance&) = default;
};

/// Empty mempool over m resources with cap `limit`.
inline BlockInstance empty_block(ResourceVector limit) {
    BlockInstance inst;
    inst.consumption.assign(limit.size(), {});
    inst.limit = std::move(limit);
    return inst;
}

struct ValidationReport {
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    explicit operator bool() const noexcept { return ok(); }
    [[nodiscard]] std::string summary() const {
        std::string s;
        for (const auto& v : violations) {
            if (!s.empty()) s += "; ";
            s += v;
        }
        return s;
    }
};

/// Enumerates every violated BlockInstance invariant. Never throws.
inline ValidationReport validate_instance(const BlockInstance& inst) {
    ValidationReport report;
    auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    const std::size_t m = inst.resources();
    const std::size_t n = inst.transactions();

    if (!vec::all_finite(inst.limit.span())) fail("limit has non-finite entry");
    if (!vec::all_nonnegative(inst.limit.span())) fail("limit has negative entry");

    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(inst.welfare[j])) {
            fail("welfare " + std::to_string(j) + " is non-finite");
        } else if (inst.welfare[j] < 0.0) {
            fail("welfare " + std::to_string(j) + " is negative");
        }
    }

    bool shape_ok = inst.consumption.size() == m;
    if (!shape_ok) {
        fail("consumption has " + std::to_string(inst.consumption.size()) +
             " rows, expected " + std::to_string(m));
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            if (inst.consumption[i].size() != n) {
                fail("consumption row " + std::to_string(i) + " has length " +
                     std::to_string(inst.consumption[i].size()) + ", expected " +
                     std::to_string(n));
                shape_ok = false;
            }
        }
    }

    if (shape_ok) {
        for (std::size_t j = 0; j < n; ++j) {
            bool exceeds = false;
            for (std::size_t i = 0; i < m; ++i) {
                const double a = inst.consumption[i][j];
                if (!std::isfinite(a)) {
                    fail("consumption (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") is non-finite");
                } else if (a < 0.0) {
                    fail("consumption (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") is negative");
                } else if (a > inst.limit[i]) {
                    exceeds = true;
                }
            }
            if (exceeds) fail("column exceeds limit: transaction " + std::to_string(j));
        }
    }

    for (const auto& [a, b] : inst.exclusions) {
        if (a >= n || b >= n) {
            fail("exclusion (" + std::to_string(a) + ", " + std::to_string(b) +
                 ") index out of range");
        } else if (a == b) {
            fail("irreflexive violated: exclusion (" + std::to_string(a) + ", " +
                 std::to_string(b) + ")");
        }
    }
    return report;
}

inline void require_valid(const BlockInstance& inst) {
    auto report = validate_instance(inst);
    if (!report) throw InvalidArgument("invalid block instance: " + report.summary());
}

/// Output of one simulated block.
struct TraceRecord {
    std::int64_t block_height = 0;
    PriceVector price;
    std::vector<std::uint8_t> chosen;
    ResourceVector usage;
    ResourceVector supply_opt;
    GradientVector gradient;
    double dual_value = 0.0;
    /// Exponential choice functions only: the dual point left {|z|_inf <= log M}.
    bool domain_exit = false;
};

// JSON -----------------------------------------------------------------------

inline nlohmann::json to_json(const BlockInstance& inst) {
    nlohmann::json j;
    j["welfare"] = inst.welfare;
    j["consumption"] = inst.consumption;
    j["limit"] = inst.limit.values();
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& [a, b] : inst.exclusions) ex.push_back({a, b});
    j["exclusions"] = std::move(ex);
    return j;
}

inline std::vector<double> json_reals(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) {
        throw InvalidArgument(std::string("missing array field \"") + key + "\"");
    }
    std::vector<double> out;
    out.reserve(j.at(key).size());
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw InvalidArgument(std::string("non-numeric entry in \"") + key + "\"");
        out.push_back(v.get<double>());
    }
    return out;
}

/// Parses a BlockInstance; the shape is checked here, the invariants by
/// validate_instance.
inline BlockInstance block_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("block instance must be a JSON object");
    BlockInstance inst;
    inst.welfare = json_reals(j, "welfare");
    inst.limit = ResourceVector(json_reals(j, "limit"));
    if (!j.contains("consumption") || !j.at("consumption").is_array()) {
        throw InvalidArgument("missing array field \"consumption\"");
    }
    for (const auto& row : j.at("consumption")) {
        if (!row.is_array()) throw InvalidArgument("consumption rows must be arrays");
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number()) throw InvalidArgument("non-numeric consumption entry");
            r.push_back(v.get<double>());
        }
        inst.consumption.push_back(std::move(r));
    }
    if (j.contains("exclusions")) {
        for (const auto& pair : j.at("exclusions")) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
                !pair[1].is_number_unsigned()) {
                throw InvalidArgument("exclusions must be [j, k] pairs of nonnegative integers");
            }
            inst.exclusions.emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::size_t>());
        }
    }
    return inst;
}

}  // namespace feemarket

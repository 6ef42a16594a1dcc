#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "lln/explorer.hpp"
#include "lln/pathmodel.hpp"
#include "lln/simulator.hpp"

namespace lln {

// A flat output field. Empty values print as an empty CSV cell or JSON null;
// lists print ';'-joined in CSV and as arrays in JSON.
using Value = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string,
                           std::vector<double>>;

class Record {
public:
    template <class T>
    Record& add(std::string key, const T& v) {
        if constexpr (std::is_same_v<T, Value>)
            return put(std::move(key), v);
        else if constexpr (std::is_same_v<T, bool>)
            return put(std::move(key), Value(v));
        else if constexpr (std::is_floating_point_v<T>)
            return put(std::move(key), Value(static_cast<double>(v)));
        else if constexpr (std::is_integral_v<T> && std::is_signed_v<T>)
            return put(std::move(key), Value(static_cast<std::int64_t>(v)));
        else if constexpr (std::is_integral_v<T>)
            return put(std::move(key), Value(static_cast<std::uint64_t>(v)));
        else if constexpr (std::is_same_v<T, std::optional<double>>)
            return put(std::move(key), v ? Value(*v) : Value());
        else if constexpr (std::is_same_v<T, std::vector<double>>)
            return put(std::move(key), Value(v));
        else
            return put(std::move(key), Value(std::string(std::string_view(v))));
    }
    Record& append(const Record& other);

    const std::vector<std::pair<std::string, Value>>& fields() const { return fields_; }
    const Value* find(std::string_view key) const;

private:
    Record& put(std::string key, Value v);
    std::vector<std::pair<std::string, Value>> fields_;
};

enum class OutputFormat { Csv, Jsonl };

// Shortest round-trip text for a double; "" for non-finite values.
std::string format_double(double v);

// Metadata lines: "# key=value" in CSV, {"meta":key,"value":value} in JSON lines.
void write_metadata(std::ostream& out, OutputFormat fmt, const std::vector<std::pair<std::string, std::string>>& meta);

// Rows must share field names and order; CSV prints a header taken from the first row.
void write_records(std::ostream& out, OutputFormat fmt, const std::vector<Record>& rows);

Record scenario_record(const PathScenario& s);
Record model_record(const PathScenario& s, const ModelReport& rep);
Record sim_record(const SimConfig& cfg, const SimReport& rep);
Record sweep_record(SweepAxis axis, const SweepRow& row);
Record frontier_record(FamilyKind kind, const FrontierPoint& pt);

struct Verdict {
    double model_total_bits = 0.0;
    double sim_mean_total_bits = 0.0;
    double sim_std_error = 0.0;
    double z = 0.0;  // |sim - model| / stderr; 0 when both agree exactly
    bool pass = false;
};

// Pass when |sim mean - model| <= 3 stderr.
std::optional<Verdict> compare(const ModelReport& model, const SimReport& sim);
Record validate_record(const SimConfig& cfg, const ModelReport& model, const SimReport& sim);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace lln

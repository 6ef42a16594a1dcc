#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lln/explorer.hpp"
#include "lln/pathmodel.hpp"
#include "lln/simulator.hpp"

namespace lln {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepSection {
    SweepAxis axis = SweepAxis::Ber;
    std::vector<double> grid = {1e-6, 1e-5, 1e-4, 2e-4, 3e-4, 4e-4, 5e-4, 6e-4, 7e-4, 8e-4};
    std::vector<std::uint32_t> mss = {64, 512};

    friend bool operator==(const SweepSection&, const SweepSection&) = default;
};

struct FrontierSection {
    FamilyKind family = FamilyKind::R;
    std::vector<double> values = {1, 2, 3, 4, 5, 6, 7};
    std::vector<double> h = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::uint32_t short_mss = 64;
    std::uint32_t long_mss = 512;
    double ber_min = 1e-7;
    double ber_max = 1e-1;
    std::uint32_t points_per_decade = 20;
    double rel_tol = 1e-3;

    friend bool operator==(const FrontierSection&, const FrontierSection&) = default;
};

struct SimSection {
    std::uint64_t replications = 1000;
    std::uint64_t seed = 1;
    Fidelity fidelity = Fidelity::FrameLevel;
    Estimator estimator = Estimator::Replay;
    std::optional<std::uint64_t> segment_cap;
    std::uint64_t attempt_cap = 1'000'000;
    std::uint64_t regenerative_batch = 1000;

    friend bool operator==(const SimSection&, const SimSection&) = default;
};

// Everything a run needs. Defaults are the reference scenario.
struct RunConfig {
    PathScenario scenario;
    EnergyParams energy;
    SimSection sim;
    SweepSection sweep;
    FrontierSection frontier;
    FailureBitsVariant if_variant = FailureBitsVariant::Normalized;
    unsigned threads = 0;

    void validate() const;
    SimConfig sim_config() const;
    SweepSpec sweep_spec() const;
    FrontierSpec frontier_spec() const;
    CrossoverOptions crossover_options() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// "default" (the default) or "calibrated". Only the layout differs.
RunConfig preset_config(std::string_view name);

// Applies key = value lines on top of base. source names the input in errors.
RunConfig parse_config(std::string_view text, const RunConfig& base = {}, std::string_view source = "<config>");
RunConfig load_config(const std::string& path, const RunConfig& base = {});

// Canonical text; parse_config(print_config(c)) == c.
std::string print_config(const RunConfig& c);

// Lists: comma separated numbers; integer ranges a..b are expanded.
std::vector<double> parse_list(std::string_view text);
std::string format_list(const std::vector<double>& xs);

}  // namespace lln

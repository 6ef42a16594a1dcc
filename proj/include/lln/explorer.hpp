#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lln/pathmodel.hpp"

namespace lln {

enum class SweepAxis { Ber, R, Alpha, H, Mss };

std::string_view to_string(SweepAxis a);
std::optional<SweepAxis> parse_sweep_axis(std::string_view s);

// n points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

struct SweepSpec {
    PathScenario base;
    SweepAxis axis = SweepAxis::Ber;
    std::vector<double> grid;
    // Ignored when the axis is mss itself.
    std::vector<std::uint32_t> mss_list = {64, 512};
    EnergyParams energy;
    FailureBitsVariant variant = FailureBitsVariant::Normalized;
    unsigned threads = 0;

    void validate() const;
};

struct SweepRow {
    std::size_t index = 0;  // grid index
    double value = 0.0;     // grid value
    std::uint32_t mss_bytes = 0;
    PathScenario scenario;
    ModelReport report;
    std::optional<std::string> error;  // set when this point could not be evaluated
};

// Applies one axis value to a scenario. h replicates the first hop.
PathScenario apply_axis(const PathScenario& base, SweepAxis axis, double value);

// Rows ordered by grid index, then by mss_list order.
std::vector<SweepRow> sweep(const SweepSpec& spec);

struct CrossoverOptions {
    std::uint32_t short_mss = 64;
    std::uint32_t long_mss = 512;
    double ber_min = 1e-7;
    double ber_max = 1e-1;
    unsigned points_per_decade = 20;
    double rel_tol = 1e-3;
    EnergyParams energy;
    FailureBitsVariant variant = FailureBitsVariant::Normalized;
};

enum class CrossoverStatus {
    Found,
    NoCrossover,  // the long MSS never goes from cheaper to dearer inside the scan range
    Error,        // configuration could not be evaluated
};

std::string_view to_string(CrossoverStatus s);

struct FrontierPoint {
    double family_value = 0.0;
    std::size_t h = 0;
    CrossoverStatus status = CrossoverStatus::NoCrossover;
    double crossover_ber = 0.0;
    // Long MSS cheaper at ber_lo, short MSS cheaper at ber_hi.
    double ber_lo = 0.0;
    double ber_hi = 0.0;
    bool multiple = false;  // more than one sign change seen in the scan
    std::string error;
};

// Energy of the long MSS minus the short one; +inf when only the long one
// diverges, -inf when only the short one does, NaN when both do.
double energy_gap(const PathScenario& base, double ber, const CrossoverOptions& opt);

// base supplies hop count, r and layout; its BERs are overwritten.
FrontierPoint crossover_ber(const PathScenario& base, const CrossoverOptions& opt = {});
FrontierPoint crossover_ber(std::size_t h, std::uint32_t r, double alpha, const FrameLayout& layout,
                            const CrossoverOptions& opt = {});

enum class FamilyKind { R, Alpha };

struct FrontierSpec {
    FamilyKind kind = FamilyKind::R;
    std::vector<double> family = {1, 2, 3, 4, 5, 6, 7};
    std::vector<std::size_t> h_values = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::uint32_t r = 3;     // held fixed for an alpha family
    double alpha = 0.0;      // held fixed for an r family
    FrameLayout layout;
    CrossoverOptions options;
    unsigned threads = 0;

    void validate() const;
};

// One point per (family member, h), ordered by family then h.
std::vector<FrontierPoint> frontier(const FrontierSpec& spec);

}  // namespace lln

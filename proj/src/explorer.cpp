#include "lln/explorer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lln/parallel.hpp"

namespace lln {

namespace {

void check_monotone(const std::vector<double>& grid, const char* what) {
    if (grid.empty()) throw std::invalid_argument(std::string(what) + ": grid is empty");
    if (grid.size() < 2) return;
    const bool up = grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]) || (up ? grid[i] <= grid[i - 1] : grid[i] >= grid[i - 1]))
            throw std::invalid_argument(std::string(what) + ": grid must be strictly monotone");
    }
}

std::uint32_t as_count(double v, const char* what) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 4294967295.0)
        throw std::invalid_argument(std::string(what) + " must be a positive integer");
    return static_cast<std::uint32_t>(v);
}

double total_energy(const PathScenario& s, const CrossoverOptions& opt) {
    const ModelReport rep = evaluate(s, opt.energy, opt.variant);
    if (rep.status == ModelStatus::Diverges || !rep.total_joules) return std::numeric_limits<double>::infinity();
    return *rep.total_joules;
}

int sign_of(double g) {
    if (std::isnan(g)) return 0;
    return g < 0.0 ? -1 : (g > 0.0 ? 1 : 0);
}

}  // namespace

std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::Ber: return "ber";
        case SweepAxis::R: return "r";
        case SweepAxis::Alpha: return "alpha";
        case SweepAxis::H: return "h";
        case SweepAxis::Mss: return "mss";
    }
    return "?";
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view s) {
    for (SweepAxis a : {SweepAxis::Ber, SweepAxis::R, SweepAxis::Alpha, SweepAxis::H, SweepAxis::Mss})
        if (to_string(a) == s) return a;
    return std::nullopt;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > 0.0) || n == 0) throw std::invalid_argument("log_grid: need lo, hi > 0 and n >= 1");
    if (n == 1) return {lo};
    std::vector<double> g(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n == 0) throw std::invalid_argument("linear_grid: n must be at least 1");
    if (n == 1) return {lo};
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.back() = hi;
    return g;
}

void SweepSpec::validate() const {
    base.validate();
    energy.validate();
    check_monotone(grid, "sweep");
    if (axis != SweepAxis::Mss && mss_list.empty()) throw std::invalid_argument("sweep: mss list is empty");
    for (double v : grid) {
        switch (axis) {
            case SweepAxis::Ber:
                if (!(v >= 0.0 && v < 1.0)) throw std::invalid_argument("sweep: ber values must lie in [0, 1)");
                break;
            case SweepAxis::Alpha:
                if (!(v >= 0.0)) throw std::invalid_argument("sweep: alpha values must be non-negative");
                break;
            case SweepAxis::R: as_count(v, "sweep: r"); break;
            case SweepAxis::H: as_count(v, "sweep: h"); break;
            case SweepAxis::Mss: as_count(v, "sweep: mss"); break;
        }
    }
}

PathScenario apply_axis(const PathScenario& base, SweepAxis axis, double value) {
    PathScenario s = base;
    switch (axis) {
        case SweepAxis::Ber:
            for (auto& hop : s.hops) hop.ber = value;
            break;
        case SweepAxis::R: {
            const std::uint32_t r = as_count(value, "r");
            for (auto& hop : s.hops) hop.max_attempts = r;
            break;
        }
        case SweepAxis::Alpha: s.layout.alpha = value; break;
        case SweepAxis::H: s.hops.assign(as_count(value, "h"), base.hops.front()); break;
        case SweepAxis::Mss: s.mss_bytes = as_count(value, "mss"); break;
    }
    return s;
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<std::uint32_t> mss =
        spec.axis == SweepAxis::Mss ? std::vector<std::uint32_t>{0} : spec.mss_list;
    std::vector<SweepRow> rows(spec.grid.size() * mss.size());
    parallel_for(rows.size(), spec.threads, [&](std::size_t k) {
        SweepRow& row = rows[k];
        row.index = k / mss.size();
        row.value = spec.grid[row.index];
        row.scenario = apply_axis(spec.base, spec.axis, row.value);
        if (spec.axis != SweepAxis::Mss) row.scenario.mss_bytes = mss[k % mss.size()];
        row.mss_bytes = row.scenario.mss_bytes;
        try {
            row.report = evaluate(row.scenario, spec.energy, spec.variant);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

std::string_view to_string(CrossoverStatus s) {
    switch (s) {
        case CrossoverStatus::Found: return "ok";
        case CrossoverStatus::NoCrossover: return "no_crossover";
        case CrossoverStatus::Error: return "error";
    }
    return "?";
}

double energy_gap(const PathScenario& base, double ber, const CrossoverOptions& opt) {
    PathScenario s = apply_axis(base, SweepAxis::Ber, ber);
    s.mss_bytes = opt.long_mss;
    const double e_long = total_energy(s, opt);
    s.mss_bytes = opt.short_mss;
    const double e_short = total_energy(s, opt);
    if (std::isinf(e_long) && std::isinf(e_short)) return std::numeric_limits<double>::quiet_NaN();
    return e_long - e_short;
}

FrontierPoint crossover_ber(const PathScenario& base, const CrossoverOptions& opt) {
    if (!(opt.ber_min > 0.0) || !(opt.ber_max > opt.ber_min) || !(opt.ber_max < 1.0) ||
        opt.points_per_decade == 0 || !(opt.rel_tol > 0.0))
        throw std::invalid_argument("crossover: invalid scan options");

    FrontierPoint pt;
    pt.h = base.hops.size();

    const double decades = std::log10(opt.ber_max / opt.ber_min);
    const auto n = static_cast<std::size_t>(std::ceil(decades * opt.points_per_decade)) + 1;
    const std::vector<double> scan = log_grid(opt.ber_min, opt.ber_max, n);

    // Last BER with a definite sign and the sign itself.
    double prev_ber = 0.0;
    int prev_sign = 0;
    int changes = 0;
    bool found = false;
    for (double ber : scan) {
        const int sg = sign_of(energy_gap(base, ber, opt));
        if (sg == 0) continue;
        if (prev_sign != 0 && sg != prev_sign) {
            ++changes;
            if (!found && prev_sign < 0) {
                found = true;
                pt.ber_lo = prev_ber;
                pt.ber_hi = ber;
            }
        }
        prev_sign = sg;
        prev_ber = ber;
    }
    pt.multiple = changes > 1;
    if (!found) {
        pt.status = CrossoverStatus::NoCrossover;
        return pt;
    }

    while (pt.ber_hi / pt.ber_lo - 1.0 > opt.rel_tol) {
        const double mid = std::sqrt(pt.ber_lo * pt.ber_hi);
        const int sg = sign_of(energy_gap(base, mid, opt));
        if (sg < 0)
            pt.ber_lo = mid;
        else if (sg > 0)
            pt.ber_hi = mid;
        else {
            pt.ber_lo = pt.ber_hi = mid;
            break;
        }
    }
    pt.crossover_ber = std::sqrt(pt.ber_lo * pt.ber_hi);
    pt.status = CrossoverStatus::Found;
    return pt;
}

FrontierPoint crossover_ber(std::size_t h, std::uint32_t r, double alpha, const FrameLayout& layout,
                            const CrossoverOptions& opt) {
    FrameLayout l = layout;
    l.alpha = alpha;
    const PathScenario base = PathScenario::uniform(h, opt.ber_min, r, opt.short_mss, l);
    return crossover_ber(base, opt);
}

void FrontierSpec::validate() const {
    if (family.empty()) throw std::invalid_argument("frontier: family is empty");
    if (h_values.empty()) throw std::invalid_argument("frontier: h range is empty");
    for (std::size_t h : h_values)
        if (h < 1) throw std::invalid_argument("frontier: h must be at least 1");
    for (double v : family) {
        if (kind == FamilyKind::R) as_count(v, "frontier: r");
        else if (!(v >= 0.0)) throw std::invalid_argument("frontier: alpha must be non-negative");
    }
    if (r < 1) throw std::invalid_argument("frontier: r must be at least 1");
    if (!(alpha >= 0.0)) throw std::invalid_argument("frontier: alpha must be non-negative");
    layout.validate();
}

std::vector<FrontierPoint> frontier(const FrontierSpec& spec) {
    spec.validate();
    std::vector<FrontierPoint> out(spec.family.size() * spec.h_values.size());
    parallel_for(out.size(), spec.threads, [&](std::size_t k) {
        const double member = spec.family[k / spec.h_values.size()];
        const std::size_t h = spec.h_values[k % spec.h_values.size()];
        const std::uint32_t r = spec.kind == FamilyKind::R ? as_count(member, "r") : spec.r;
        const double alpha = spec.kind == FamilyKind::Alpha ? member : spec.alpha;
        FrontierPoint pt;
        try {
            pt = crossover_ber(h, r, alpha, spec.layout, spec.options);
        } catch (const std::exception& e) {
            pt.h = h;
            pt.status = CrossoverStatus::Error;
            pt.error = e.what();
        }
        pt.family_value = member;
        out[k] = std::move(pt);
    });
    return out;
}

}  // namespace lln

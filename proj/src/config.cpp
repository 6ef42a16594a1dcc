#include "lln/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lln/report.hpp"

namespace lln {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

double to_double(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("expected a number, got '" + std::string(s) + "'");
    if (!std::isfinite(v)) throw ConfigError("number must be finite");
    return v;
}

std::uint64_t to_u64(std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("expected a non-negative integer, got '" + std::string(s) + "'");
    return v;
}

std::uint32_t to_u32(std::string_view s) {
    const std::uint64_t v = to_u64(s);
    if (v > 0xffffffffULL) throw ConfigError("integer out of range: " + std::string(s));
    return static_cast<std::uint32_t>(v);
}

std::string fmt(double v) { return format_double(v); }

bool all_equal_ber(const PathScenario& s) {
    for (const auto& h : s.hops)
        if (h.ber != s.hops.front().ber) return false;
    return true;
}

bool all_equal_r(const PathScenario& s) {
    for (const auto& h : s.hops)
        if (h.max_attempts != s.hops.front().max_attempts) return false;
    return true;
}

// Scenario keys interact (hops, ber, hop_ber, ...), so they are applied after the file is read.
struct ScenarioDraft {
    std::optional<std::size_t> hops;
    std::optional<double> ber;
    std::optional<std::uint32_t> r;
    std::optional<std::vector<double>> hop_ber;
    std::optional<std::vector<double>> hop_r;
};

void apply_draft(PathScenario& s, const ScenarioDraft& d) {
    std::size_t n = s.hops.size();
    if (d.hops) n = *d.hops;
    else if (d.hop_ber) n = d.hop_ber->size();
    else if (d.hop_r) n = d.hop_r->size();
    if (n == 0) throw ConfigError("scenario: hops must be at least 1");
    const HopParams first = s.hops.front();
    if (n != s.hops.size()) s.hops.assign(n, first);
    if (d.ber)
        for (auto& h : s.hops) h.ber = *d.ber;
    if (d.r)
        for (auto& h : s.hops) h.max_attempts = *d.r;
    if (d.hop_ber) {
        if (d.hop_ber->size() != n) throw ConfigError("scenario: hop_ber needs one value per hop");
        for (std::size_t i = 0; i < n; ++i) s.hops[i].ber = (*d.hop_ber)[i];
    }
    if (d.hop_r) {
        if (d.hop_r->size() != n) throw ConfigError("scenario: hop_r needs one value per hop");
        for (std::size_t i = 0; i < n; ++i) {
            const double v = (*d.hop_r)[i];
            if (v != std::floor(v) || v < 1.0) throw ConfigError("scenario: hop_r values must be positive integers");
            s.hops[i].max_attempts = static_cast<std::uint32_t>(v);
        }
    }
}

std::map<std::uint32_t, std::uint32_t> parse_fragments(std::string_view v) {
    std::map<std::uint32_t, std::uint32_t> out;
    for (auto item : split(v, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw ConfigError("fragments: expected mss:count pairs, got '" + std::string(item) + "'");
        out[to_u32(parts[0])] = to_u32(parts[1]);
    }
    return out;
}

std::vector<double> parse_grid_spec(std::string_view v, bool log) {
    const auto parts = split(v, ',');
    if (parts.size() != 3) throw ConfigError("grid range: expected lo, hi, n");
    try {
        return log ? log_grid(to_double(parts[0]), to_double(parts[1]), to_u64(parts[2]))
                   : linear_grid(to_double(parts[0]), to_double(parts[1]), to_u64(parts[2]));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

const std::set<std::string> kSections = {"scenario", "layout", "energy", "sim", "sweep", "frontier", "model", "run"};

}  // namespace

std::vector<double> parse_list(std::string_view text) {
    std::vector<double> out;
    for (auto item : split(text, ',')) {
        if (item.empty()) throw ConfigError("empty list item");
        const auto dots = item.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(to_double(item));
            continue;
        }
        const std::uint64_t a = to_u64(item.substr(0, dots));
        const std::uint64_t b = to_u64(item.substr(dots + 2));
        if (b < a) throw ConfigError("range " + std::string(item) + " is empty");
        if (b - a > 100000) throw ConfigError("range " + std::string(item) + " is too long");
        for (std::uint64_t i = a; i <= b; ++i) out.push_back(static_cast<double>(i));
    }
    return out;
}

std::string format_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += fmt(xs[i]);
    }
    return out;
}

RunConfig preset_config(std::string_view name) {
    RunConfig c;
    if (name == "default") return c;
    if (name == "calibrated") {
        c.scenario.layout = calibrated_layout();
        return c;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected default or calibrated)");
}

RunConfig parse_config(std::string_view text, const RunConfig& base, std::string_view source) {
    RunConfig c = base;
    ScenarioDraft draft;
    std::string section;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;

    auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };

    FrameLayout& L = c.scenario.layout;
    using Setter = std::function<void(std::string_view)>;
    // Size keys take a bit or a byte suffix.
    const std::map<std::string, std::uint32_t*> layout_sizes = {
        {"mtu", &L.mtu_bits},
        {"ll_data_header", &L.ll_data_header_bits},
        {"ll_ack", &L.ll_ack_bits},
        {"frag_header", &L.frag_header_bits},
        {"ip_header", &L.ip_header_bits},
        {"tcp_header", &L.tcp_header_bits},
    };
    const std::map<std::string, std::map<std::string, Setter>> setters = {
        {"scenario",
         {
             {"hops", [&](auto v) { draft.hops = to_u64(v); }},
             {"ber", [&](auto v) { draft.ber = to_double(v); }},
             {"r", [&](auto v) { draft.r = to_u32(v); }},
             {"hop_ber", [&](auto v) { draft.hop_ber = parse_list(v); }},
             {"hop_r", [&](auto v) { draft.hop_r = parse_list(v); }},
             {"mss_bytes", [&](auto v) { c.scenario.mss_bytes = to_u32(v); }},
             {"transfer_bytes", [&](auto v) { c.scenario.transfer_bytes = to_u64(v); }},
             {"transfer_bits",
              [&](auto v) {
                  const auto bits = to_u64(v);
                  if (bits % 8) throw ConfigError("transfer_bits must be a whole number of bytes");
                  c.scenario.transfer_bytes = bits / 8;
              }},
         }},
        {"layout",
         {
             {"alpha", [&](auto v) { L.alpha = to_double(v); }},
             {"fragment_mode",
              [&](auto v) {
                  if (v == "explicit") L.fragment_mode = FragmentMode::Explicit;
                  else if (v == "computed") L.fragment_mode = FragmentMode::Computed;
                  else throw ConfigError("fragment_mode must be explicit or computed");
              }},
             {"fragments", [&](auto v) { L.explicit_fragments = parse_fragments(v); }},
         }},
        {"energy",
         {
             {"tx_uj_per_bit", [&](auto v) { c.energy.tx_uj_per_bit = to_double(v); }},
             {"rx_uj_per_bit", [&](auto v) { c.energy.rx_uj_per_bit = to_double(v); }},
             {"n_neighbors", [&](auto v) { c.energy.n_neighbors = to_double(v); }},
         }},
        {"sim",
         {
             {"replications", [&](auto v) { c.sim.replications = to_u64(v); }},
             {"seed", [&](auto v) { c.sim.seed = to_u64(v); }},
             {"fidelity",
              [&](auto v) {
                  if (v == "frame") c.sim.fidelity = Fidelity::FrameLevel;
                  else if (v == "bit") c.sim.fidelity = Fidelity::BitLevel;
                  else throw ConfigError("fidelity must be frame or bit");
              }},
             {"estimator",
              [&](auto v) {
                  if (v == "replay") c.sim.estimator = Estimator::Replay;
                  else if (v == "regenerative") c.sim.estimator = Estimator::Regenerative;
                  else throw ConfigError("estimator must be replay or regenerative");
              }},
             {"segment_cap",
              [&](auto v) {
                  if (v == "none") c.sim.segment_cap.reset();
                  else c.sim.segment_cap = to_u64(v);
              }},
             {"attempt_cap", [&](auto v) { c.sim.attempt_cap = to_u64(v); }},
             {"regenerative_batch", [&](auto v) { c.sim.regenerative_batch = to_u64(v); }},
         }},
        {"sweep",
         {
             {"axis",
              [&](auto v) {
                  const auto a = parse_sweep_axis(v);
                  if (!a) throw ConfigError("axis must be one of ber, r, alpha, h, mss");
                  c.sweep.axis = *a;
              }},
             {"grid", [&](auto v) { c.sweep.grid = parse_list(v); }},
             {"grid_log", [&](auto v) { c.sweep.grid = parse_grid_spec(v, true); }},
             {"grid_linear", [&](auto v) { c.sweep.grid = parse_grid_spec(v, false); }},
             {"mss",
              [&](auto v) {
                  c.sweep.mss.clear();
                  for (double x : parse_list(v)) {
                      if (x != std::floor(x) || x < 1 || x > 0xffffffffp0) throw ConfigError("mss values must be positive integers");
                      c.sweep.mss.push_back(static_cast<std::uint32_t>(x));
                  }
              }},
         }},
        {"frontier",
         {
             {"family",
              [&](auto v) {
                  if (v == "r") c.frontier.family = FamilyKind::R;
                  else if (v == "alpha") c.frontier.family = FamilyKind::Alpha;
                  else throw ConfigError("family must be r or alpha");
              }},
             {"values", [&](auto v) { c.frontier.values = parse_list(v); }},
             {"h", [&](auto v) { c.frontier.h = parse_list(v); }},
             {"short_mss", [&](auto v) { c.frontier.short_mss = to_u32(v); }},
             {"long_mss", [&](auto v) { c.frontier.long_mss = to_u32(v); }},
             {"ber_min", [&](auto v) { c.frontier.ber_min = to_double(v); }},
             {"ber_max", [&](auto v) { c.frontier.ber_max = to_double(v); }},
             {"points_per_decade", [&](auto v) { c.frontier.points_per_decade = to_u32(v); }},
             {"rel_tol", [&](auto v) { c.frontier.rel_tol = to_double(v); }},
         }},
        {"model",
         {
             {"if_variant",
              [&](auto v) {
                  if (v == "normalized") c.if_variant = FailureBitsVariant::Normalized;
                  else if (v == "published") c.if_variant = FailureBitsVariant::Published;
                  else throw ConfigError("if_variant must be normalized or published");
              }},
         }},
        {"run",
         {
             {"threads", [&](auto v) { c.threads = to_u32(v); }},
         }},
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where() + "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!kSections.count(section)) throw ConfigError(where() + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where() + "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(where() + "key '" + key + "' outside any section");

        // Same quantity given twice, possibly in different units.
        std::string stem = key;
        for (const char* suffix : {"_bits", "_bytes"}) {
            const std::string s(suffix);
            if (stem.size() > s.size() && stem.compare(stem.size() - s.size(), s.size(), s) == 0 &&
                section == "layout")
                stem.resize(stem.size() - s.size());
        }
        if (section == "scenario" && (key == "transfer_bits" || key == "transfer_bytes")) stem = "transfer";
        if (section == "sweep" && key.rfind("grid", 0) == 0) stem = "grid";
        if (!seen.insert(section + "." + stem).second)
            throw ConfigError(where() + "'" + key + "' given more than once (or in both bits and bytes)");

        try {
            if (section == "layout" && layout_sizes.count(stem) && stem != key) {
                const bool bytes = key.size() > 6 && key.compare(key.size() - 6, 6, "_bytes") == 0;
                const std::uint64_t n = to_u64(value) * (bytes ? 8 : 1);
                if (n > 0xffffffffULL) throw ConfigError("size out of range");
                *layout_sizes.at(stem) = static_cast<std::uint32_t>(n);
                continue;
            }
            const auto& table = setters.at(section);
            const auto it = table.find(key);
            if (it == table.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            it->second(value);
        } catch (const ConfigError& e) {
            throw ConfigError(where() + e.what());
        }
    }

    try {
        apply_draft(c.scenario, draft);
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(source) + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(source) + ": " + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path + ": cannot open");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), base, path);
}

std::string print_config(const RunConfig& c) {
    std::ostringstream o;
    const auto& s = c.scenario;
    const auto& L = s.layout;
    o << "[scenario]\n";
    o << "hops = " << s.hops.size() << '\n';
    if (all_equal_ber(s)) {
        o << "ber = " << fmt(s.hops.front().ber) << '\n';
    } else {
        std::vector<double> b;
        for (const auto& h : s.hops) b.push_back(h.ber);
        o << "hop_ber = " << format_list(b) << '\n';
    }
    if (all_equal_r(s)) {
        o << "r = " << s.hops.front().max_attempts << '\n';
    } else {
        std::vector<double> r;
        for (const auto& h : s.hops) r.push_back(h.max_attempts);
        o << "hop_r = " << format_list(r) << '\n';
    }
    o << "mss_bytes = " << s.mss_bytes << '\n';
    o << "transfer_bytes = " << s.transfer_bytes << '\n';

    o << "\n[layout]\n";
    o << "mtu_bits = " << L.mtu_bits << '\n';
    o << "ll_data_header_bits = " << L.ll_data_header_bits << '\n';
    o << "ll_ack_bits = " << L.ll_ack_bits << '\n';
    o << "frag_header_bits = " << L.frag_header_bits << '\n';
    o << "ip_header_bits = " << L.ip_header_bits << '\n';
    o << "tcp_header_bits = " << L.tcp_header_bits << '\n';
    o << "alpha = " << fmt(L.alpha) << '\n';
    o << "fragment_mode = " << (L.fragment_mode == FragmentMode::Explicit ? "explicit" : "computed") << '\n';
    o << "fragments = ";
    bool first = true;
    for (const auto& [mss, m] : L.explicit_fragments) {
        o << (first ? "" : ", ") << mss << ':' << m;
        first = false;
    }
    o << '\n';

    o << "\n[energy]\n";
    o << "tx_uj_per_bit = " << fmt(c.energy.tx_uj_per_bit) << '\n';
    o << "rx_uj_per_bit = " << fmt(c.energy.rx_uj_per_bit) << '\n';
    o << "n_neighbors = " << fmt(c.energy.n_neighbors) << '\n';

    o << "\n[sim]\n";
    o << "replications = " << c.sim.replications << '\n';
    o << "seed = " << c.sim.seed << '\n';
    o << "fidelity = " << to_string(c.sim.fidelity) << '\n';
    o << "estimator = " << to_string(c.sim.estimator) << '\n';
    o << "segment_cap = " << (c.sim.segment_cap ? std::to_string(*c.sim.segment_cap) : "none") << '\n';
    o << "attempt_cap = " << c.sim.attempt_cap << '\n';
    o << "regenerative_batch = " << c.sim.regenerative_batch << '\n';

    o << "\n[sweep]\n";
    o << "axis = " << to_string(c.sweep.axis) << '\n';
    o << "grid = " << format_list(c.sweep.grid) << '\n';
    std::vector<double> mss(c.sweep.mss.begin(), c.sweep.mss.end());
    o << "mss = " << format_list(mss) << '\n';

    o << "\n[frontier]\n";
    o << "family = " << (c.frontier.family == FamilyKind::R ? "r" : "alpha") << '\n';
    o << "values = " << format_list(c.frontier.values) << '\n';
    o << "h = " << format_list(c.frontier.h) << '\n';
    o << "short_mss = " << c.frontier.short_mss << '\n';
    o << "long_mss = " << c.frontier.long_mss << '\n';
    o << "ber_min = " << fmt(c.frontier.ber_min) << '\n';
    o << "ber_max = " << fmt(c.frontier.ber_max) << '\n';
    o << "points_per_decade = " << c.frontier.points_per_decade << '\n';
    o << "rel_tol = " << fmt(c.frontier.rel_tol) << '\n';

    o << "\n[model]\n";
    o << "if_variant = " << to_string(c.if_variant) << '\n';

    o << "\n[run]\n";
    o << "threads = " << c.threads << '\n';
    return o.str();
}

void RunConfig::validate() const {
    sim_config().validate();
    if (sweep.mss.empty()) throw std::invalid_argument("sweep: mss list is empty");
    sweep_spec().validate();
    frontier_spec().validate();
    const auto opt = crossover_options();
    if (!(opt.ber_min > 0.0) || !(opt.ber_max > opt.ber_min) || !(opt.ber_max < 1.0))
        throw std::invalid_argument("frontier: need 0 < ber_min < ber_max < 1");
    if (opt.points_per_decade == 0) throw std::invalid_argument("frontier: points_per_decade must be positive");
    if (!(opt.rel_tol > 0.0)) throw std::invalid_argument("frontier: rel_tol must be positive");
    if (opt.short_mss == 0 || opt.long_mss == 0) throw std::invalid_argument("frontier: MSS values must be positive");
}

SimConfig RunConfig::sim_config() const {
    SimConfig s;
    s.scenario = scenario;
    s.energy = energy;
    s.replications = sim.replications;
    s.master_seed = sim.seed;
    s.fidelity = sim.fidelity;
    s.estimator = sim.estimator;
    s.segment_cap = sim.segment_cap;
    s.attempt_cap = sim.attempt_cap;
    s.regenerative_batch = sim.regenerative_batch;
    s.threads = threads;
    return s;
}

SweepSpec RunConfig::sweep_spec() const {
    SweepSpec s;
    s.base = scenario;
    s.axis = sweep.axis;
    s.grid = sweep.grid;
    s.mss_list = sweep.mss;
    s.energy = energy;
    s.variant = if_variant;
    s.threads = threads;
    return s;
}

CrossoverOptions RunConfig::crossover_options() const {
    CrossoverOptions o;
    o.short_mss = frontier.short_mss;
    o.long_mss = frontier.long_mss;
    o.ber_min = frontier.ber_min;
    o.ber_max = frontier.ber_max;
    o.points_per_decade = frontier.points_per_decade;
    o.rel_tol = frontier.rel_tol;
    o.energy = energy;
    o.variant = if_variant;
    return o;
}

FrontierSpec RunConfig::frontier_spec() const {
    FrontierSpec f;
    f.kind = frontier.family;
    f.family = frontier.values;
    f.h_values.clear();
    for (double h : frontier.h) {
        if (h != std::floor(h) || h < 1.0) throw std::invalid_argument("frontier: h values must be positive integers");
        f.h_values.push_back(static_cast<std::size_t>(h));
    }
    f.r = scenario.hops.front().max_attempts;
    f.alpha = scenario.layout.alpha;
    f.layout = scenario.layout;
    f.options = crossover_options();
    f.threads = threads;
    return f;
}

}  // namespace lln

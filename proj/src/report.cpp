#include "lln/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace lln {

namespace {

bool uniform_ber(const PathScenario& s) {
    for (const auto& hop : s.hops)
        if (hop.ber != s.hops.front().ber) return false;
    return true;
}

bool uniform_r(const PathScenario& s) {
    for (const auto& hop : s.hops)
        if (hop.max_attempts != s.hops.front().max_attempts) return false;
    return true;
}

std::string csv_cell(const Value& v) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(std::uint64_t u) const { return std::to_string(u); }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(const std::vector<double>& xs) const {
            std::string out;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (i) out += ';';
                out += format_double(xs[i]);
            }
            return out;
        }
    };
    std::string s = std::visit(Visitor{}, v);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

nlohmann::ordered_json json_value(const Value& v) {
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(bool b) const { return b; }
        nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
        nlohmann::ordered_json operator()(std::uint64_t u) const { return u; }
        nlohmann::ordered_json operator()(double d) const {
            if (!std::isfinite(d)) return nullptr;
            return d;
        }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
        nlohmann::ordered_json operator()(const std::vector<double>& xs) const {
            auto arr = nlohmann::ordered_json::array();
            for (double x : xs) arr.push_back(std::isfinite(x) ? nlohmann::ordered_json(x) : nullptr);
            return arr;
        }
    };
    return std::visit(Visitor{}, v);
}

Record counters_record(const SimCounters& c) {
    Record r;
    r.add("link_attempts", c.link_attempts)
        .add("link_failures", c.link_failures)
        .add("partial_failures", c.partial_failures)
        .add("hop_drops", c.hop_drops)
        .add("segment_sends", c.segment_sends)
        .add("segment_retransmissions", c.segment_retransmissions)
        .add("duplicates_suppressed", c.duplicates_suppressed)
        .add("tcp_ack_losses", c.tcp_ack_losses)
        .add("truncated_segments", c.truncated_segments);
    return r;
}

std::vector<double> hop_values(const std::vector<HopModel>& hops, double HopModel::*field) {
    std::vector<double> out;
    for (const auto& h : hops) out.push_back(h.*field);
    return out;
}

std::vector<double> hop_hs(const std::vector<HopModel>& hops) {
    std::vector<double> out;
    for (const auto& h : hops) out.push_back(h.h_s ? *h.h_s : std::numeric_limits<double>::quiet_NaN());
    return out;
}

}  // namespace

Record& Record::put(std::string key, Value v) {
    if (auto* d = std::get_if<double>(&v); d && !std::isfinite(*d)) v = std::monostate{};
    fields_.emplace_back(std::move(key), std::move(v));
    return *this;
}

Record& Record::append(const Record& other) {
    for (const auto& [k, v] : other.fields_) fields_.emplace_back(k, v);
    return *this;
}

const Value* Record::find(std::string_view key) const {
    for (const auto& [k, v] : fields_)
        if (k == key) return &v;
    return nullptr;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) return {};
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_metadata(std::ostream& out, OutputFormat fmt,
                    const std::vector<std::pair<std::string, std::string>>& meta) {
    for (const auto& [k, v] : meta) {
        if (fmt == OutputFormat::Csv) {
            out << "# " << k << '=' << v << '\n';
        } else {
            nlohmann::ordered_json j;
            j["meta"] = k;
            j["value"] = v;
            out << j.dump() << '\n';
        }
    }
}

void write_records(std::ostream& out, OutputFormat fmt, const std::vector<Record>& rows) {
    if (rows.empty()) return;
    if (fmt == OutputFormat::Csv) {
        const auto& head = rows.front().fields();
        for (std::size_t i = 0; i < head.size(); ++i) out << (i ? "," : "") << head[i].first;
        out << '\n';
        for (const auto& row : rows) {
            const auto& f = row.fields();
            for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << csv_cell(f[i].second);
            out << '\n';
        }
        return;
    }
    for (const auto& row : rows) {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const auto& [k, v] : row.fields()) j[k] = json_value(v);
        out << j.dump() << '\n';
    }
}

Record scenario_record(const PathScenario& s) {
    Record r;
    std::vector<double> bers, rs;
    for (const auto& hop : s.hops) {
        bers.push_back(hop.ber);
        rs.push_back(hop.max_attempts);
    }
    r.add("mss_bytes", s.mss_bytes)
        .add("transfer_bytes", s.transfer_bytes)
        .add("hops", s.hops.size())
        .add("ber", uniform_ber(s) ? std::optional<double>(s.hops.front().ber) : std::nullopt)
        .add("r", uniform_r(s) ? Value(static_cast<std::uint64_t>(s.hops.front().max_attempts)) : Value())
        .add("alpha", s.layout.alpha)
        .add("frag_header_bits", s.layout.frag_header_bits)
        .add("fragment_mode", s.layout.fragment_mode == FragmentMode::Explicit ? "explicit" : "computed")
        .add("hop_ber", bers)
        .add("hop_r", rs);
    return r;
}

Record model_record(const PathScenario& s, const ModelReport& rep) {
    Record r;
    r.add("source", "model").append(scenario_record(s));
    const auto& f = rep.frames;
    r.add("m", f.m)
        .add("k_data_bits", f.data.k_bits)
        .add("d_data_bits", f.data.d_bits)
        .add("c_data_bits", f.data.c_bits)
        .add("k_ack_bits", f.ack.k_bits)
        .add("d_ack_bits", f.ack.d_bits)
        .add("c_ack_bits", f.ack.c_bits)
        .add("ll_ack_bits", f.ll_ack_bits)
        .add("hop_f_data", hop_values(rep.data_hops, &HopModel::f))
        .add("hop_h_s_data", hop_hs(rep.data_hops))
        .add("hop_h_f_data", hop_values(rep.data_hops, &HopModel::h_f))
        .add("hop_f_ack", hop_values(rep.ack_hops, &HopModel::f))
        .add("hop_h_s_ack", hop_hs(rep.ack_hops))
        .add("hop_h_f_ack", hop_values(rep.ack_hops, &HopModel::h_f))
        .add("q_s", rep.data_path.q_s)
        .add("q_s_ack", rep.ack_path.q_s)
        .add("e_s", rep.e_s)
        .add("e_f", rep.e_f)
        .add("e_s_ack", rep.e_s_ack)
        .add("e_f_ack", rep.e_f_ack)
        .add("i_f", rep.i_f)
        .add("p_s", rep.p_s)
        .add("s_s", rep.s_s)
        .add("s_f", rep.s_f)
        .add("s", rep.s)
        .add("segments", rep.segments)
        .add("total_bits", rep.total_bits)
        .add("total_joules", rep.total_joules)
        .add("status", rep.status == ModelStatus::Ok ? "ok" : "diverges")
        .add("if_variant", to_string(rep.variant));
    return r;
}

Record sim_record(const SimConfig& cfg, const SimReport& rep) {
    Record r;
    r.add("source", "sim").append(scenario_record(cfg.scenario));
    r.add("replications", rep.replications)
        .add("seed", rep.master_seed)
        .add("fidelity", to_string(rep.fidelity))
        .add("estimator", to_string(rep.estimator))
        .add("segments", rep.segments)
        .add("segments_simulated", rep.segments_simulated)
        .add("mean_total_bits", rep.mean_total_bits)
        .add("stddev", rep.stddev)
        .add("stderr", rep.std_error)
        .add("ci95", rep.ci95)
        .add("mean_joules", rep.mean_joules)
        .add("ber_scale", rep.ber_scale)
        .add("truncated", rep.truncated)
        .append(counters_record(rep.counters));
    return r;
}

Record sweep_record(SweepAxis axis, const SweepRow& row) {
    Record r;
    r.add("axis", to_string(axis)).add("index", row.index).add("value", row.value);
    if (row.error) {
        // Keep the column set of a normal row so the table stays rectangular.
        ModelReport blank;
        blank.status = ModelStatus::Diverges;
        Record m = model_record(row.scenario, blank);
        Record cleared;
        for (const auto& [k, v] : m.fields()) {
            if (k == "source" || k == "mss_bytes" || k == "transfer_bytes" || k == "hops" || k == "ber" ||
                k == "r" || k == "alpha" || k == "frag_header_bits" || k == "fragment_mode" || k == "hop_ber" ||
                k == "hop_r" || k == "if_variant")
                cleared.add(k, v);
            else if (k == "status")
                cleared.add(k, "error");
            else
                cleared.add(k, Value{});
        }
        r.append(cleared).add("error", *row.error);
    } else {
        r.append(model_record(row.scenario, row.report)).add("error", "");
    }
    return r;
}

Record frontier_record(FamilyKind kind, const FrontierPoint& pt) {
    const bool found = pt.status == CrossoverStatus::Found;
    std::string flags(to_string(pt.status));
    if (pt.multiple) flags += ";multiple";
    Record r;
    r.add("family", kind == FamilyKind::R ? "r" : "alpha")
        .add("family_value", pt.family_value)
        .add("h", pt.h)
        .add("crossover_ber", found ? std::optional<double>(pt.crossover_ber) : std::nullopt)
        .add("ber_lo", found ? std::optional<double>(pt.ber_lo) : std::nullopt)
        .add("ber_hi", found ? std::optional<double>(pt.ber_hi) : std::nullopt)
        .add("flags", flags)
        .add("error", pt.error);
    return r;
}

std::optional<Verdict> compare(const ModelReport& model, const SimReport& sim) {
    if (!model.total_bits) return std::nullopt;
    Verdict v;
    v.model_total_bits = *model.total_bits;
    v.sim_mean_total_bits = sim.mean_total_bits;
    v.sim_std_error = sim.std_error;
    const double diff = std::abs(v.sim_mean_total_bits - v.model_total_bits);
    const double scale = std::max(std::abs(v.model_total_bits), 1.0);
    if (v.sim_std_error > 0.0)
        v.z = diff / v.sim_std_error;
    else
        v.z = diff <= 1e-9 * scale ? 0.0 : std::numeric_limits<double>::infinity();
    v.pass = v.z <= 3.0 && !sim.truncated;
    return v;
}

Record validate_record(const SimConfig& cfg, const ModelReport& model, const SimReport& sim) {
    const auto v = compare(model, sim);
    Record r;
    r.add("source", "validate").append(scenario_record(cfg.scenario));
    r.add("replications", sim.replications)
        .add("seed", sim.master_seed)
        .add("fidelity", to_string(sim.fidelity))
        .add("estimator", to_string(sim.estimator))
        .add("if_variant", to_string(model.variant))
        .add("model_total_bits", model.total_bits)
        .add("model_total_joules", model.total_joules)
        .add("sim_mean_total_bits", sim.mean_total_bits)
        .add("sim_stderr", sim.std_error)
        .add("sim_mean_joules", sim.mean_joules)
        .add("z", v ? std::optional<double>(v->z) : std::nullopt)
        .add("truncated", sim.truncated)
        .add("verdict", v ? (v->pass ? "PASS" : "FAIL") : "DIVERGES");
    return r;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace lln

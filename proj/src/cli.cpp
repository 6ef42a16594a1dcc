#include "lln/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <ostream>

#include <CLI11.hpp>

#include "lln/config.hpp"
#include "lln/report.hpp"

#ifndef LLN_VERSION
#define LLN_VERSION "0.0.0"
#endif

namespace lln::cli {

namespace {

const char* kFieldHelp = R"(Output fields (stable names):
  model     source, mss_bytes, transfer_bytes, hops, ber, r, alpha, frag_header_bits,
            fragment_mode, hop_ber, hop_r, m, k_data_bits, d_data_bits, c_data_bits,
            k_ack_bits, d_ack_bits, c_ack_bits, ll_ack_bits, hop_f_data, hop_h_s_data,
            hop_h_f_data, hop_f_ack, hop_h_s_ack, hop_h_f_ack, q_s, q_s_ack, e_s, e_f,
            e_s_ack, e_f_ack, i_f, p_s, s_s, s_f, s, segments, total_bits, total_joules,
            status (ok|diverges), if_variant
  simulate  source, scenario fields, replications, seed, fidelity, estimator, segments,
            segments_simulated, mean_total_bits, stddev, stderr, ci95, mean_joules,
            ber_scale, truncated, link_attempts, link_failures, partial_failures,
            hop_drops, segment_sends, segment_retransmissions, duplicates_suppressed,
            tcp_ack_losses, truncated_segments
  validate  source, scenario fields, replications, seed, fidelity, estimator, if_variant,
            model_total_bits, model_total_joules, sim_mean_total_bits, sim_stderr,
            sim_mean_joules, z, truncated, verdict (PASS|FAIL|DIVERGES)
  sweep     axis, index, value, then the model fields, then error
  frontier  family, family_value, h, crossover_ber, ber_lo, ber_hi, flags, error
Lists are ';'-joined in CSV. Undefined values are empty (CSV) or null (JSON).
Metadata precedes the rows as '# key=value' lines (CSV) or {"meta":..,"value":..} lines.
Exit status: 0 ok, 1 configuration error, 2 divergent/degenerate result under --strict.)";

struct Flags {
    std::string config;
    std::string preset;
    bool print_config = false;
    std::string format = "csv";
    bool strict = false;

    std::string seed, reps, threads;
    std::string mss, ber, hops, r, alpha, frag_header_bits, fragment_mode, transfer_bytes;
    std::string fidelity, estimator, segment_cap, if_variant;
    std::string axis, grid, grid_log, sweep_mss;
    std::string family, h;
};

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Flags are spliced in as config lines so they get the same validation and messages.
std::string flags_as_config(const Flags& f) {
    std::string text;
    auto put = [&](const char* section, const char* key, const std::string& v) {
        if (v.empty()) return;
        text += std::string("[") + section + "]\n" + key + " = " + v + "\n";
    };
    put("sim", "seed", f.seed);
    put("sim", "replications", f.reps);
    put("run", "threads", f.threads);
    put("scenario", "mss_bytes", f.mss);
    put("scenario", "ber", f.ber);
    put("scenario", "hops", f.hops);
    put("scenario", "r", f.r);
    put("scenario", "transfer_bytes", f.transfer_bytes);
    put("layout", "alpha", f.alpha);
    put("layout", "frag_header_bits", f.frag_header_bits);
    put("layout", "fragment_mode", f.fragment_mode);
    put("sim", "fidelity", f.fidelity);
    put("sim", "estimator", f.estimator);
    put("sim", "segment_cap", f.segment_cap);
    put("model", "if_variant", f.if_variant);
    put("sweep", "axis", f.axis);
    put("sweep", "grid", f.grid);
    put("sweep", "grid_log", f.grid_log);
    put("sweep", "mss", f.sweep_mss);
    if (!f.family.empty()) {
        const auto eq = f.family.find('=');
        if (eq == std::string::npos) throw ConfigError("--family expects r=LIST or alpha=LIST");
        put("frontier", "family", f.family.substr(0, eq));
        put("frontier", "values", f.family.substr(eq + 1));
    }
    put("frontier", "h", f.h);
    return text;
}

RunConfig apply_flags(const RunConfig& cfg, const Flags& f) {
    return parse_config(flags_as_config(f), cfg, "<command line>");
}

RunConfig build_config(const Flags& f) {
    RunConfig base = preset_config(f.preset.empty() ? "default" : f.preset);
    std::string path = f.config;
    if (path.empty())
        if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
    if (!path.empty()) base = load_config(path, base);
    return apply_flags(base, f);
}

std::vector<std::pair<std::string, std::string>> metadata(const std::string& command, const RunConfig& cfg) {
    RunConfig hashed = cfg;
    hashed.threads = 0;  // thread count does not change results
    return {
        {"tool", std::string("lln ") + LLN_VERSION},
        {"command", command},
        {"config_hash", "fnv1a64:" + hex64(fnv1a64(print_config(hashed)))},
        {"seed", std::to_string(cfg.sim.seed)},
        {"rng", std::string(kRngName)},
        {"timestamp", utc_timestamp()},
    };
}

int emit(std::ostream& out, OutputFormat fmt, const std::string& command, const RunConfig& cfg,
         const std::vector<Record>& rows, bool degenerate, bool strict) {
    write_metadata(out, fmt, metadata(command, cfg));
    write_records(out, fmt, rows);
    return strict && degenerate ? kExitStrict : kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Energy model and Monte Carlo simulator for reliable bulk transfer over multi-hop lossy links",
                 "lln"};
    app.fallthrough();
    app.set_help_flag("--help", "Print this help message and exit");
    app.footer(kFieldHelp);
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", std::string("lln ") + LLN_VERSION);

    Flags f;
    app.add_option("--config", f.config, std::string("Config file (default: $") + kConfigEnv + ")");
    app.add_option("--preset", f.preset, "Base parameter set: default (default) or calibrated");
    app.add_flag("--print-config", f.print_config, "Print the effective configuration and exit");
    app.add_option("--format", f.format, "Output format: csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_flag("--strict", f.strict, "Exit 2 on divergent, degenerate or failing results");
    app.add_option("--seed", f.seed, "Master seed");
    app.add_option("--reps", f.reps, "Replications");
    app.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
    app.add_option("--mss", f.mss, "MSS in bytes");
    app.add_option("--ber", f.ber, "Bit error rate on every hop");
    app.add_option("--hops", f.hops, "Hop count");
    app.add_option("--r", f.r, "Link-layer attempts per hop");
    app.add_option("--alpha", f.alpha, "FEC redundancy ratio");
    app.add_option("--frag-header-bits", f.frag_header_bits, "Per-fragment header bits");
    app.add_option("--fragment-mode", f.fragment_mode, "explicit or computed");
    app.add_option("--transfer-bytes", f.transfer_bytes, "Transfer size in bytes");
    app.add_option("--fidelity", f.fidelity, "Simulator fidelity: frame or bit");
    app.add_option("--estimator", f.estimator, "Simulator estimator: replay or regenerative");
    app.add_option("--segment-cap", f.segment_cap, "Segments simulated per replication (or none)");
    app.add_option("--if-variant", f.if_variant, "Fragment-failure term: normalized or published");
    app.add_option("--axis", f.axis, "Sweep axis: ber, r, alpha, h or mss");
    app.add_option("--grid", f.grid, "Sweep grid, e.g. 1e-6,1e-4,8e-4 or 2..7");
    app.add_option("--grid-log", f.grid_log, "Log-spaced sweep grid: lo,hi,n");
    app.add_option("--sweep-mss", f.sweep_mss, "MSS values compared in a sweep");
    app.add_option("--family", f.family, "Frontier family: r=1..7 or alpha=1e-3,1e-2,1e-1");
    app.add_option("--h", f.h, "Frontier hop counts, e.g. 1..9");

    auto* model = app.add_subcommand("model", "Evaluate the closed-form model");
    auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo simulator");
    auto* validate = app.add_subcommand("validate", "Model and simulator side by side with a 3-sigma verdict");
    auto* sweep_cmd = app.add_subcommand("sweep", "Model over a parameter grid");
    auto* frontier_cmd = app.add_subcommand("frontier", "MSS crossover BER per hop count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    RunConfig cfg;
    try {
        cfg = build_config(f);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    if (f.print_config) {
        out << print_config(cfg);
        return kExitOk;
    }
    const OutputFormat fmt = f.format == "jsonl" ? OutputFormat::Jsonl : OutputFormat::Csv;

    try {
        if (*model || app.get_subcommands().empty()) {
            const ModelReport rep = evaluate(cfg.scenario, cfg.energy, cfg.if_variant);
            return emit(out, fmt, "model", cfg, {model_record(cfg.scenario, rep)},
                        rep.status != ModelStatus::Ok, f.strict);
        }
        if (*simulate) {
            const SimConfig sc = cfg.sim_config();
            const SimReport rep = lln::simulate(sc);
            if (rep.truncated) err << "warning: " << rep.counters.truncated_segments << " segment(s) hit the attempt cap\n";
            return emit(out, fmt, "simulate", cfg, {sim_record(sc, rep)}, rep.truncated, f.strict);
        }
        if (*validate) {
            const SimConfig sc = cfg.sim_config();
            const ModelReport m = evaluate(cfg.scenario, cfg.energy, cfg.if_variant);
            const SimReport s = lln::simulate(sc);
            const auto v = compare(m, s);
            return emit(out, fmt, "validate", cfg, {validate_record(sc, m, s)}, !v || !v->pass, f.strict);
        }
        if (*sweep_cmd) {
            const SweepSpec spec = cfg.sweep_spec();
            std::vector<Record> rows;
            bool bad = false;
            for (const auto& row : lln::sweep(spec)) {
                bad = bad || row.error || row.report.status != ModelStatus::Ok;
                rows.push_back(sweep_record(spec.axis, row));
            }
            return emit(out, fmt, "sweep", cfg, rows, bad, f.strict);
        }
        if (*frontier_cmd) {
            const FrontierSpec spec = cfg.frontier_spec();
            std::vector<Record> rows;
            bool bad = false;
            for (const auto& pt : lln::frontier(spec)) {
                bad = bad || pt.status != CrossoverStatus::Found || pt.multiple;
                rows.push_back(frontier_record(spec.kind, pt));
            }
            return emit(out, fmt, "frontier", cfg, rows, bad, f.strict);
        }
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

}  // namespace lln::cli

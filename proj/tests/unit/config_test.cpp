#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "lln/config.hpp"

using namespace lln;

namespace {

std::string error_of(std::string_view text) {
    try {
        parse_config(text, {}, "test.ini");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("defaults are the reference scenario") {
    const RunConfig c;
    CHECK(c.scenario.hops.size() == 5);
    CHECK(c.scenario.hops[0].ber == 3e-4);
    CHECK(c.scenario.hops[0].max_attempts == 3);
    CHECK(c.scenario.layout.mtu_bits == 1016);
    CHECK(c.scenario.layout.ll_ack_bits == 40);
    CHECK(c.scenario.layout.alpha == 0.0);
    CHECK(c.scenario.transfer_bytes == 51200);
    CHECK(c.energy.tx_uj_per_bit == 0.24);
    CHECK(c.energy.rx_uj_per_bit == 0.21);
    CHECK(c.energy.n_neighbors == 2.0);
}

TEST_CASE("presets") {
    CHECK(preset_config("default") == RunConfig{});
    CHECK(preset_config("calibrated").scenario.layout == calibrated_layout());
    CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("print and parse round-trip") {
    RunConfig c = preset_config("calibrated");
    c.scenario.hops = {HopParams{1e-5, 2}, HopParams{3.3e-4, 4}, HopParams{0.0, 1}};
    c.scenario.layout.alpha = 0.1;
    c.scenario.layout.fragment_mode = FragmentMode::Computed;
    c.scenario.layout.explicit_fragments = {{64, 1}, {128, 2}, {512, 8}};
    c.energy.n_neighbors = 3.5;
    c.sim.segment_cap = 12;
    c.sim.fidelity = Fidelity::BitLevel;
    c.sim.estimator = Estimator::Regenerative;
    c.sweep.axis = SweepAxis::Alpha;
    c.sweep.grid = log_grid(1e-3, 1.0, 13);
    c.frontier.family = FamilyKind::Alpha;
    c.frontier.values = {1e-3, 1e-2, 0.1};
    c.if_variant = FailureBitsVariant::Published;
    c.threads = 3;
    const std::string text = print_config(c);
    const RunConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(print_config(back) == text);
    CHECK(parse_config(print_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("bytes variants convert to bits") {
    const RunConfig c = parse_config("[layout]\nfrag_header_bytes = 16\nmtu_bytes = 127\n");
    CHECK(c.scenario.layout.frag_header_bits == 128);
    CHECK(c.scenario.layout.mtu_bits == 1016);
    const RunConfig t = parse_config("[scenario]\ntransfer_bits = 800\n");
    CHECK(t.scenario.transfer_bytes == 100);
    CHECK(error_of("[scenario]\ntransfer_bits = 801\n").find("whole number of bytes") != std::string::npos);
}

TEST_CASE("errors carry file and line") {
    CHECK(error_of("[scenario]\n\nbogus = 1\n").rfind("test.ini:3:", 0) == 0);
    CHECK(error_of("[scenario]\nbogus = 1\n").find("unknown key 'bogus'") != std::string::npos);
    CHECK(error_of("[nowhere]\n").find("unknown section") != std::string::npos);
    CHECK(error_of("ber = 1\n").find("outside any section") != std::string::npos);
    CHECK(error_of("[scenario]\nber\n").find("expected key = value") != std::string::npos);
    CHECK(error_of("[scenario]\nber = abc\n").find("test.ini:2:") == 0);
    CHECK(error_of("[layout]\nmtu_bits = 1016\nmtu_bytes = 127\n").find("test.ini:3:") == 0);
    CHECK(error_of("[scenario]\nr = 2\nr = 3\n").find("more than once") != std::string::npos);
    CHECK_FALSE(error_of("[scenario]\nber = 2\n").empty());
    CHECK_FALSE(error_of("[layout]\nfragment_mode = sometimes\n").empty());
    CHECK_FALSE(error_of("[layout]\nll_ack_bits = 0\n").empty());
    CHECK_FALSE(error_of("[sim]\nreplications = 0\n").empty());
    CHECK_FALSE(error_of("[sweep]\ngrid = 3e-4, 1e-4, 2e-4\n").empty());
}

TEST_CASE("comments and whitespace") {
    const RunConfig c = parse_config("# header\n  [scenario]   \n ber = 1e-4   # trailing\n\n");
    CHECK(c.scenario.hops[0].ber == 1e-4);
}

TEST_CASE("scenario keys combine") {
    RunConfig c = parse_config("[scenario]\nhops = 3\nber = 2e-4\nr = 4\n");
    CHECK(c.scenario.hops.size() == 3);
    CHECK(c.scenario.hops[2] == HopParams{2e-4, 4});
    c = parse_config("[scenario]\nhop_ber = 1e-4, 2e-4\nhop_r = 1, 5\n");
    REQUIRE(c.scenario.hops.size() == 2);
    CHECK(c.scenario.hops[1] == HopParams{2e-4, 5});
    CHECK_FALSE(error_of("[scenario]\nhops = 3\nhop_ber = 1e-4, 2e-4\n").empty());
}

TEST_CASE("lists and ranges") {
    CHECK(parse_list("1..4") == std::vector<double>{1, 2, 3, 4});
    CHECK(parse_list("1e-3, 1e-2,0.1") == std::vector<double>{1e-3, 1e-2, 0.1});
    CHECK(parse_list("1..2, 7") == std::vector<double>{1, 2, 7});
    CHECK_THROWS_AS(parse_list("3..1"), ConfigError);
    CHECK_THROWS_AS(parse_list("1,,2"), ConfigError);
    const RunConfig c = parse_config("[sweep]\ngrid_log = 1e-6, 1e-2, 5\n");
    CHECK(c.sweep.grid.size() == 5);
}

TEST_CASE("derived specs") {
    RunConfig c = preset_config("calibrated");
    c.threads = 2;
    const SimConfig s = c.sim_config();
    CHECK(s.scenario == c.scenario);
    CHECK(s.threads == 2);
    const FrontierSpec f = c.frontier_spec();
    CHECK(f.layout == calibrated_layout());
    CHECK(f.r == 3);
    CHECK(f.h_values.size() == 9);
}

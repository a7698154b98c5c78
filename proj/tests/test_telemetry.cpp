/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include <functional>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ufs/error.hpp"
#include "ufs/telemetry.hpp"

using namespace ufs;

namespace
{
    std::vector<double> demands(const WorkloadTrace &trace)
    {
        std::vector<double> out;
        for (const auto &entry : trace.entries) {
            out.push_back(entry.demand);
        }
        return out;
    }

    ErrorKind kind_of(const std::function<void()> &fn)
    {
        try {
            fn();
        }
        catch (const Error &ex) {
            return ex.kind();
        }
        FAIL("no error thrown");
        return ErrorKind::source;
    }
}

TEST_CASE("history window keeps the newest samples in order")
{
    HistoryWindow win(3);
    ThroughputSample s1{0.1, 1e9}, s2{0.2, 2e9}, s3{0.3, 3e9}, s4{0.4, 4e9};
    win.push(s1);
    CHECK(win.size() == 1);
    CHECK(win.oldest() == s1);
    win.push(s2);
    win.push(s3);
    CHECK(win.full());
    win.push(s4);
    REQUIRE(win.size() == 3);
    CHECK(win[0] == s2);
    CHECK(win[1] == s3);
    CHECK(win[2] == s4);
}

TEST_CASE("history window rejects bad samples")
{
    HistoryWindow win(3);
    win.push({1.0, 5e9});
    CHECK(kind_of([&] { win.push({1.0, 6e9}); }) == ErrorKind::ordering);
    CHECK(kind_of([&] { win.push({0.5, 6e9}); }) == ErrorKind::ordering);
    CHECK(kind_of([&] { win.push({2.0, -1.0}); }) == ErrorKind::parameter);
    CHECK(kind_of([&] { win.push({2.0, std::nan("")}); }) == ErrorKind::parameter);
    CHECK(win.size() == 1);
    CHECK(kind_of([] { HistoryWindow bad(0); }) == ErrorKind::parameter);
}

TEST_CASE("history window never exceeds capacity and stays ordered")
{
    std::mt19937_64 rng(7);
    for (std::size_t cap = 1; cap <= 12; ++cap) {
        HistoryWindow win(cap);
        double t = 0.0;
        for (int i = 0; i < 50; ++i) {
            t += std::uniform_real_distribution<double>(0.01, 0.2)(rng);
            win.push({t, std::uniform_real_distribution<double>(0.0, 3e10)(rng)});
            CHECK(win.size() == std::min<std::size_t>(cap, i + 1));
            CHECK(win.newest().timestamp == t);
            for (std::size_t k = 1; k < win.size(); ++k) {
                CHECK(win[k - 1].timestamp < win[k].timestamp);
            }
        }
    }
}

TEST_CASE("read_trace parses a small CSV")
{
    std::istringstream in("step,demand_gbps,compute_weight\n0,1,0\n1,2,0.5\n2,0,1\n");
    auto trace = read_trace(in);
    CHECK(demands(trace) == std::vector<double>{1e9, 2e9, 0.0});
    CHECK(trace.entries[1].compute_weight == 0.5);
    CHECK(trace.period == 0.1);
}

TEST_CASE("read_trace reports the offending line")
{
    std::istringstream neg("step,demand_gbps,compute_weight\n0,1,0\n1,-1,0\n");
    try {
        read_trace(neg);
        FAIL("expected a parse error");
    }
    catch (const ParseError &ex) {
        CHECK(ex.line() == 3);
        CHECK(ex.kind() == ErrorKind::parse);
        CHECK(std::string(ex.what()).find("negative demand") != std::string::npos);
    }

    std::istringstream empty("");
    try {
        read_trace(empty);
        FAIL("expected a parse error");
    }
    catch (const ParseError &ex) {
        CHECK(ex.detail().find("missing header") != std::string::npos);
    }

    std::istringstream header_only("step,demand_gbps,compute_weight\n");
    try {
        read_trace(header_only);
        FAIL("expected a parse error");
    }
    catch (const ParseError &ex) {
        CHECK(ex.detail() == "no entries");
    }

    std::istringstream steps("step,demand_gbps,compute_weight\n0,1,0\n0,1,0\n");
    CHECK_THROWS_AS(read_trace(steps), ParseError);
    std::istringstream weight("step,demand_gbps,compute_weight\n0,1,1.5\n");
    CHECK_THROWS_AS(read_trace(weight), ParseError);
}

TEST_CASE("read_trace honours metadata comments")
{
    std::istringstream in("# name=unet\n# period=0.05\n# free text\nstep,demand_gbps,compute_weight\n0,12.5,0.25\n");
    auto trace = read_trace(in);
    CHECK(trace.name == "unet");
    CHECK(trace.period == 0.05);
    CHECK(trace.entries.front().demand == 12.5e9);
}

TEST_CASE("gbps text conversion is exact")
{
    CHECK(parse_gbps("1") == 1e9);
    CHECK(parse_gbps("7.2727") == 7.2727e9);
    CHECK(parse_gbps("0.1") == 1e8);
    CHECK(parse_gbps("2e1") == 2e10);
    CHECK(parse_gbps("0") == 0.0);
    CHECK(format_gbps(2e10) == "20");
    CHECK(format_gbps(7.2727e9) == "7.2727");
    CHECK_THROWS_AS(parse_gbps("abc"), Error);
    CHECK_THROWS_AS(parse_gbps("1.0x"), Error);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 1e11);
    for (int i = 0; i < 20000; ++i) {
        double v = dist(rng);
        CHECK(parse_gbps(format_gbps(v)) == v);
    }
}

TEST_CASE("write_trace then read_trace is the identity")
{
    std::mt19937_64 rng(3);
    for (int round = 0; round < 200; ++round) {
        WorkloadTrace trace;
        trace.name = "t" + std::to_string(round);
        trace.period = std::uniform_real_distribution<double>(0.001, 2.0)(rng);
        std::size_t n = std::uniform_int_distribution<std::size_t>(1, 80)(rng);
        for (std::size_t i = 0; i < n; ++i) {
            trace.entries.push_back({std::uniform_real_distribution<double>(0.0, 5e10)(rng),
                                     std::uniform_real_distribution<double>(0.0, 1.0)(rng)});
        }
        std::stringstream io;
        write_trace(io, trace);
        CHECK(read_trace(io) == trace);
    }
}

TEST_CASE("phase alternating generator")
{
    CHECK(demands(synth_phase_alternating(0, 1e10, 2, 6, 0.1)) ==
          std::vector<double>{0, 0, 1e10, 1e10, 0, 0});
    CHECK(demands(synth_phase_alternating(1, 2, 1, 4, 0.1)) == std::vector<double>{1, 2, 1, 2});
    auto flat = synth_phase_alternating(5e9, 5e9, 3, 10, 0.1);
    for (double d : demands(flat)) {
        CHECK(d == 5e9);
    }
    CHECK_THROWS_AS(synth_phase_alternating(1, 2, 0, 4, 0.1), Error);
    CHECK_THROWS_AS(synth_phase_alternating(2, 1, 1, 4, 0.1), Error);
}

TEST_CASE("oscillating generator")
{
    CHECK(demands(synth_oscillating(1, 2, 1, 4, 0.1)) == std::vector<double>{1, 2, 1, 2});
    CHECK(demands(synth_oscillating(1, 2, 5, 5, 0.1)) == std::vector<double>(5, 1.0));
    auto trace = synth_oscillating(1e9, 2e10, 1, 50, 0.1, 0.3);
    CHECK(trace.entries.size() == 50);
    CHECK(trace.period == 0.1);
    for (const auto &entry : trace.entries) {
        CHECK(entry.compute_weight == 0.3);
    }
}

TEST_CASE("training spikes generator")
{
    CHECK(demands(synth_training_spikes(1e9, 2e10, 1, 4, 2, 0.1)) ==
          std::vector<double>{2e10, 1e9, 1e9, 1e9, 2e10, 1e9, 1e9, 1e9});
    CHECK(kind_of([] { synth_training_spikes(1e9, 2e10, 1, 4, 0, 0.1); }) == ErrorKind::parameter);
    for (double d : demands(synth_training_spikes(3e9, 3e9, 2, 5, 3, 0.1))) {
        CHECK(d == 3e9);
    }
}

TEST_CASE("generated traces follow the block rule")
{
    std::mt19937_64 rng(5);
    for (int round = 0; round < 300; ++round) {
        std::size_t block = std::uniform_int_distribution<std::size_t>(1, 9)(rng);
        std::size_t total = std::uniform_int_distribution<std::size_t>(1, 60)(rng);
        auto trace = synth_oscillating(1.0, 9.0, block, total, 0.1);
        REQUIRE(trace.entries.size() == total);
        for (std::size_t i = 0; i < total; ++i) {
            CHECK(trace.entries[i].demand == ((i / block) % 2 == 1 ? 9.0 : 1.0));
        }
        CHECK(synth_phase_alternating(1.0, 9.0, block, total, 0.1).entries == trace.entries);
    }
}

TEST_CASE("concatenation keeps order and rejects mixed periods")
{
    auto a = synth_phase_alternating(1, 1, 1, 2, 0.1);
    auto b = synth_phase_alternating(2, 2, 1, 1, 0.1);
    auto joined = concat_traces("ab", {a, b});
    CHECK(joined.name == "ab");
    CHECK(demands(joined) == std::vector<double>{1, 1, 2});
    auto c = synth_phase_alternating(2, 2, 1, 1, 0.2);
    CHECK_THROWS_AS(concat_traces("ac", {a, c}), Error);
}

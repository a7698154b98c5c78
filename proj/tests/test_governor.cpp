/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "ufs/error.hpp"
#include "ufs/governor.hpp"

using namespace ufs;

namespace
{
    // Power-of-two periods keep every timestamp and derivative exact.
    GovernorConfig exact_config(void)
    {
        GovernorConfig cfg;
        cfg.sample_period = 0.5;
        cfg.direv_length = 0.5;
        cfg.history_capacity = 4;
        return cfg;
    }

    HistoryWindow history_of(std::size_t cap, const std::vector<ThroughputSample> &samples)
    {
        HistoryWindow win(cap);
        for (const auto &s : samples) {
            win.push(s);
        }
        return win;
    }

    TuneEventLog log_of(const std::vector<int> &flags)
    {
        TuneEventLog log(flags.size());
        for (int f : flags) {
            log.push(f != 0);
        }
        return log;
    }
}

TEST_CASE("default configuration is valid and parks at f_min")
{
    GovernorConfig cfg;
    CHECK(cfg.diagnostics().empty());
    auto st = new_governor(cfg);
    CHECK(st.current_target == 0.8e9);
    CHECK(st.history.empty());
    CHECK(st.tune_log.empty());
    CHECK(!st.in_high_freq);
}

TEST_CASE("invalid configurations are rejected with the key named")
{
    GovernorConfig cfg;
    cfg.f_min = 3e9;
    auto diags = cfg.diagnostics();
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].location == "f_min_ghz");
    CHECK_THROWS_AS(new_governor(cfg), Error);

    GovernorConfig dec;
    dec.dec_threshold = 0.0;
    REQUIRE(dec.diagnostics().size() == 1);
    CHECK(dec.diagnostics()[0].location == "dec_threshold_gbps_per_s");
    try {
        new_governor(dec);
        FAIL("expected a config error");
    }
    catch (const Error &ex) {
        CHECK(ex.kind() == ErrorKind::config);
    }

    GovernorConfig span;
    span.direv_length = 5.0;
    REQUIRE(span.diagnostics().size() == 1);
    CHECK(span.diagnostics()[0].location == "direv_length_s");

    GovernorConfig thr;
    thr.high_freq_threshold = 1.5;
    CHECK(thr.diagnostics().size() == 1);
}

TEST_CASE("config file round trip")
{
    GovernorConfig cfg;
    cfg.inc_threshold = 2.5e9;
    cfg.dec_threshold = -0.75e9;
    cfg.direv_length = 0.3;
    cfg.history_capacity = 12;
    cfg.high_freq_threshold = 0.7;
    cfg.tune_log_capacity = 8;
    cfg.f_min = 1.2e9;
    cfg.f_max = 2.4e9;
    cfg.sample_period = 0.05;
    std::stringstream io;
    write_governor_config(io, cfg);
    auto back = parse_governor_config(io);
    CHECK(back.inc_threshold == cfg.inc_threshold);
    CHECK(back.dec_threshold == cfg.dec_threshold);
    CHECK(back.direv_length == cfg.direv_length);
    CHECK(back.history_capacity == cfg.history_capacity);
    CHECK(back.high_freq_threshold == cfg.high_freq_threshold);
    CHECK(back.tune_log_capacity == cfg.tune_log_capacity);
    CHECK(back.f_min == cfg.f_min);
    CHECK(back.f_max == cfg.f_max);
    CHECK(back.sample_period == cfg.sample_period);

    std::istringstream bad("f_min_ghz = 0.8\nbogus = 1\n");
    try {
        parse_governor_config(bad);
        FAIL("expected a parse error");
    }
    catch (const ParseError &ex) {
        CHECK(ex.line() == 2);
    }
}

TEST_CASE("trend prediction examples")
{
    GovernorConfig cfg = exact_config();
    auto flat = history_of(4, {{0.5, 5e9}, {1.0, 5e9}, {1.5, 5e9}});
    CHECK(throughput_derivative(cfg, flat) == 0.0);
    CHECK(predict_trend(cfg, flat) == TrendSignal::hold);

    GovernorConfig wide;
    wide.sample_period = 1.0;
    wide.direv_length = 1.0;
    wide.history_capacity = 2;
    auto up = history_of(2, {{0.0, 1e9}, {1.0, 2e10}});
    CHECK(throughput_derivative(wide, up) == 1.9e10);
    CHECK(predict_trend(wide, up) == TrendSignal::increase);
    auto down = history_of(2, {{0.0, 2e10}, {1.0, 1e9}});
    CHECK(throughput_derivative(wide, down) == -1.9e10);
    CHECK(predict_trend(wide, down) == TrendSignal::decrease);
}

TEST_CASE("trend thresholds are strict")
{
    GovernorConfig cfg = exact_config();
    // 5e8 bytes/s over 0.5 s is exactly 1e9 bytes/s^2.
    auto at_inc = history_of(4, {{0.5, 1e9}, {1.0, 1.5e9}});
    CHECK(throughput_derivative(cfg, at_inc) == cfg.inc_threshold);
    CHECK(predict_trend(cfg, at_inc) == TrendSignal::hold);
    auto at_dec = history_of(4, {{0.5, 1.5e9}, {1.0, 1e9}});
    CHECK(throughput_derivative(cfg, at_dec) == cfg.dec_threshold);
    CHECK(predict_trend(cfg, at_dec) == TrendSignal::hold);
    auto above = history_of(4, {{0.5, 1e9}, {1.0, std::nextafter(1.5e9, 2e9)}});
    CHECK(predict_trend(cfg, above) == TrendSignal::increase);
    auto below = history_of(4, {{0.5, 1.5e9}, {1.0, std::nextafter(1e9, 0.0)}});
    CHECK(predict_trend(cfg, below) == TrendSignal::decrease);
}

TEST_CASE("derivative needs a history spanning the window")
{
    GovernorConfig cfg;
    HistoryWindow win(cfg.history_capacity);
    CHECK(!trend_ready(cfg, win));
    win.push({0.1, 1e9});
    CHECK(!trend_ready(cfg, win));
    try {
        throughput_derivative(cfg, win);
        FAIL("expected not_ready");
    }
    catch (const Error &ex) {
        CHECK(ex.kind() == ErrorKind::not_ready);
    }
    win.push({0.2, 2e9});
    CHECK(trend_ready(cfg, win));
}

TEST_CASE("derivative uses the oldest sample inside the window")
{
    GovernorConfig cfg = exact_config();
    cfg.direv_length = 1.0;
    auto win = history_of(4, {{0.5, 1e9}, {1.0, 4e9}, {1.5, 2e9}, {2.0, 3e9}});
    // Window reaches back to t = 1.0 (within half a period of 2.0 - 1.0).
    CHECK(throughput_derivative(cfg, win) == (3e9 - 4e9) / 1.0);
}

TEST_CASE("tune event log")
{
    TuneEventLog log(3);
    record_tune_event(log, TrendSignal::increase);
    CHECK(log.flags() == std::vector<std::uint8_t>{1});
    TuneEventLog log2(3);
    record_tune_event(log2, TrendSignal::hold);
    CHECK(log2.flags() == std::vector<std::uint8_t>{0});

    TuneEventLog full = log_of({1, 0, 0});
    record_tune_event(full, TrendSignal::decrease);
    CHECK(full.flags() == std::vector<std::uint8_t>{0, 0, 1});
    CHECK(full.sum() == 1);
    CHECK(full.size() == 3);
}

TEST_CASE("high frequency detection examples")
{
    GovernorConfig cfg;
    CHECK(detect_high_freq(cfg, log_of({1, 1, 1, 1, 1, 1, 0, 0, 0, 0})));
    CHECK(!detect_high_freq(cfg, log_of({0, 0, 0, 0, 0, 0, 0, 0, 0, 0})));
    CHECK(!detect_high_freq(cfg, log_of({1, 0, 0, 0, 0, 0, 0, 0, 0, 0})));
    CHECK(!detect_high_freq(cfg, log_of({1, 1, 1, 1, 1, 0, 0, 0, 0, 0})));
    CHECK_THROWS_AS(detect_high_freq(cfg, TuneEventLog(10)), Error);
}

TEST_CASE("high frequency detection over every flag vector")
{
    GovernorConfig cfg;
    for (unsigned bits = 0; bits < 1024; ++bits) {
        std::vector<int> flags;
        int ones = 0;
        for (int i = 0; i < 10; ++i) {
            flags.push_back((bits >> i) & 1U);
            ones += flags.back();
        }
        CHECK(detect_high_freq(cfg, log_of(flags)) == (ones >= 6));
    }
}

TEST_CASE("target frequency mapping")
{
    GovernorConfig cfg;
    CHECK(target_frequency(TrendSignal::decrease, cfg, 2.2e9) == 0.8e9);
    CHECK(target_frequency(TrendSignal::hold, cfg, 2.2e9) == 2.2e9);
    CHECK(target_frequency(TrendSignal::hold, cfg, 0.8e9) == 0.8e9);
    CHECK(target_frequency(TrendSignal::increase, cfg, 0.8e9) == 2.2e9);
}

TEST_CASE("decide: steady throughput holds")
{
    auto st = new_governor(GovernorConfig{});
    FrequencyCommand cmd{};
    for (int i = 1; i <= 20; ++i) {
        cmd = decide(st, {i * 0.1, 5e9});
        CHECK(cmd.target == 0.8e9);
        CHECK(cmd.cause == CommandCause::hold);
    }
    CHECK(st.events_recorded == 19);
    CHECK(st.tune_log.sum() == 0);
}

TEST_CASE("decide: increase with a quiet log")
{
    auto st = new_governor(GovernorConfig{});
    for (int i = 1; i <= 10; ++i) {
        decide(st, {i * 0.1, 5e9});
    }
    auto cmd = decide(st, {1.1, 1.5e10});
    CHECK(cmd == FrequencyCommand{2.2e9, CommandCause::trend_increase});
    CHECK(st.tune_log.sum() == 1);
}

TEST_CASE("decide: lock overrides a decrease")
{
    auto st = new_governor(GovernorConfig{});
    // Warm-up, then a quiet stretch to fill the log with zeros.
    for (int i = 1; i <= 4; ++i) {
        decide(st, {i * 0.1, 5e9});
    }
    // Seven alternating rounds push the rate to 0.7.
    double values[] = {1e10, 5e9, 1e10, 5e9, 1e10, 5e9, 1e10};
    int t = 5;
    for (double v : values) {
        decide(st, {t++ * 0.1, v});
    }
    REQUIRE(st.tune_log.full());
    CHECK(st.tune_log.sum() == 7);
    auto cmd = decide(st, {t * 0.1, 5e9});
    CHECK(st.tune_log.sum() == 8);
    CHECK(cmd == FrequencyCommand{2.2e9, CommandCause::high_freq_lock});
    CHECK(st.in_high_freq);
}

TEST_CASE("warm-up round records no tune event")
{
    auto st = new_governor(GovernorConfig{});
    auto cmd = decide(st, {0.1, 2e10});
    CHECK(cmd == FrequencyCommand{0.8e9, CommandCause::hold});
    CHECK(st.events_recorded == 0);
    CHECK(st.tune_log.empty());
}

TEST_CASE("streaming decide matches the prefix oracle")
{
    std::mt19937_64 rng(21);
    GovernorConfig cfg;
    for (int round = 0; round < 10; ++round) {
        auto samples = oracle::random_samples(rng, 200, cfg.sample_period);
        MagusGovernor gov(cfg);
        for (std::size_t k = 0; k < samples.size(); ++k) {
            auto got = gov.decide(samples[k]);
            CHECK(got == oracle::command_at(cfg, samples, k));
        }
    }
}

TEST_CASE("signals are invariant under power-of-two rescaling")
{
    std::mt19937_64 rng(99);
    GovernorConfig cfg;
    for (int round = 0; round < 50; ++round) {
        double scale = std::ldexp(1.0, static_cast<int>(rng() % 21) - 10);
        GovernorConfig scaled = cfg;
        scaled.inc_threshold *= scale;
        scaled.dec_threshold *= scale;
        auto samples = oracle::random_samples(rng, 100, cfg.sample_period);
        MagusGovernor a(cfg);
        MagusGovernor b(scaled);
        for (const auto &s : samples) {
            CHECK(a.decide(s) == b.decide(ThroughputSample{s.timestamp, s.throughput * scale}));
        }
    }
}

TEST_CASE("clone_fresh starts over")
{
    MagusGovernor gov{GovernorConfig{}};
    gov.decide(ThroughputSample{0.1, 1e9});
    gov.decide(ThroughputSample{0.2, 2e10});
    auto fresh = gov.clone_fresh();
    CHECK(fresh->name() == "magus");
    CHECK(fresh->initial_frequency() == 0.8e9);
    auto &typed = dynamic_cast<MagusGovernor &>(*fresh);
    CHECK(typed.state().rounds == 0);
}

/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include <cmath>
#include <random>

#include "doctest.h"
#include "ufs/baselines.hpp"
#include "ufs/error.hpp"

using namespace ufs;

namespace
{
    Observation obs(double t, double pkg, double dram, double ipc)
    {
        return Observation{{t, 1e9}, PowerSample{t, pkg, dram}, IpcSample{t, ipc}};
    }

    Observation power_only(double pkg)
    {
        return Observation{{0.1, 1e9}, PowerSample{0.1, pkg, 0.0}, std::nullopt};
    }
}

TEST_CASE("static governors emit one frequency")
{
    FrequencyRange range;
    StaticGovernor hi(range.f_max, range);
    StaticGovernor lo(range.f_min, range);
    CHECK(hi.name() == "static_max");
    CHECK(lo.name() == "static_min");
    for (int i = 0; i < 50; ++i) {
        CHECK(hi.decide(obs(i * 0.1, 100, 5, 1)) == FrequencyCommand{2.2e9, CommandCause::fixed});
        CHECK(lo.decide(obs(i * 0.1, 100, 5, 1)) == FrequencyCommand{0.8e9, CommandCause::fixed});
    }
    CHECK(hi.initial_frequency() == 2.2e9);
    CHECK(lo.initial_frequency() == 0.8e9);
    try {
        StaticGovernor bad(range.f_max + 1.0, range);
        FAIL("expected a config error");
    }
    catch (const Error &ex) {
        CHECK(ex.kind() == ErrorKind::config);
    }
}

TEST_CASE("tdp default backs off only near the bound")
{
    FrequencyRange range;
    TdpDefaultGovernor gov(500.0, 0.05, range);
    CHECK(gov.power_bound() == 475.0);
    CHECK(gov.initial_frequency() == 2.2e9);
    CHECK(gov.decide(power_only(300.0)).target == 2.2e9);
    auto cmd = gov.decide(power_only(490.0));
    CHECK(cmd == FrequencyCommand{0.8e9, CommandCause::power_bound});
    CHECK(gov.decide(power_only(475.0)).target == 0.8e9);
    CHECK(gov.decide(power_only(474.9)).target == 2.2e9);
}

TEST_CASE("tdp default keeps its last command without a power sample")
{
    FrequencyRange range;
    TdpDefaultGovernor gov(500.0, 0.05, range);
    gov.decide(power_only(490.0));
    try {
        gov.decide(Observation{{0.2, 1e9}, std::nullopt, std::nullopt});
        FAIL("expected stale data");
    }
    catch (const Error &ex) {
        CHECK(ex.kind() == ErrorKind::stale_data);
    }
    CHECK(gov.last_command().target == 0.8e9);
}

TEST_CASE("tdp default parameter checks")
{
    FrequencyRange range;
    CHECK_THROWS_AS(TdpDefaultGovernor(0.0, 0.05, range), Error);
    CHECK_THROWS_AS(TdpDefaultGovernor(500.0, 1.0, range), Error);
    CHECK_THROWS_AS(TdpDefaultGovernor(500.0, -0.1, range), Error);
}

TEST_CASE("ups descends one step per stable round")
{
    UpsGovernor gov{UpsState{}};
    CHECK(gov.decide(obs(0.1, 100, 10, 1.0)) == FrequencyCommand{2.2e9, CommandCause::fixed});
    for (int k = 1; k <= 5; ++k) {
        auto cmd = gov.decide(obs(0.1 * (k + 1), 100, 10, 1.0));
        CHECK(cmd.cause == CommandCause::step_down);
        CHECK(cmd.target == std::round(2.2e9 - k * 0.1e9));
    }
}

TEST_CASE("ups resets on a DRAM power jump")
{
    UpsGovernor gov{UpsState{}};
    gov.decide(obs(0.1, 100, 10, 1.0));
    gov.decide(obs(0.2, 100, 10, 1.0));
    gov.decide(obs(0.3, 100, 10, 1.0));
    auto cmd = gov.decide(obs(0.4, 100, 15, 1.0));
    CHECK(cmd == FrequencyCommand{2.2e9, CommandCause::phase_reset});
    CHECK(gov.state().ref_dram_power == 15.0);
}

TEST_CASE("ups steps back up when IPC falls")
{
    UpsGovernor gov{UpsState{}};
    gov.decide(obs(0.1, 100, 10, 1.0));
    CHECK(gov.decide(obs(0.2, 100, 10, 1.0)).target == 2.1e9);
    auto cmd = gov.decide(obs(0.3, 100, 10, 0.9));
    CHECK(cmd == FrequencyCommand{2.2e9, CommandCause::step_up});
}

TEST_CASE("ups requires power and IPC")
{
    UpsGovernor gov{UpsState{}};
    CHECK_THROWS_AS(gov.decide(power_only(100)), Error);
}

TEST_CASE("ups matches a hand-stepped oracle")
{
    // Frequencies tracked as an integer number of 0.1 GHz steps above 0.8 GHz.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int round = 0; round < 100; ++round) {
        UpsGovernor gov{UpsState{}};
        int level = 14;
        double ref_dram = -1.0;
        double ref_ipc = -1.0;
        double dram = 10.0;
        double ipc = 1.0;
        for (int i = 0; i < 200; ++i) {
            if (unit(rng) < 0.05) {
                dram = 5.0 + unit(rng) * 20.0;
            }
            ipc = unit(rng) < 0.3 ? 0.5 + unit(rng) * 0.5 : ipc;
            auto cmd = gov.decide(obs(0.1 * (i + 1), 100, dram, ipc));
            CommandCause cause;
            if (ref_dram < 0.0) {
                ref_dram = dram;
                ref_ipc = ipc;
                cause = CommandCause::fixed;
            }
            else if (std::fabs(dram - ref_dram) / ref_dram > 0.2) {
                level = 14;
                ref_dram = dram;
                ref_ipc = ipc;
                cause = CommandCause::phase_reset;
            }
            else if (ipc >= (1.0 - 0.02) * ref_ipc) {
                level = std::max(0, level - 1);
                cause = CommandCause::step_down;
            }
            else {
                level = std::min(14, level + 1);
                cause = CommandCause::step_up;
            }
            REQUIRE(cmd.cause == cause);
            REQUIRE(cmd.target == (8 + level) * 1e8);
        }
    }
}

TEST_CASE("ups parameter checks")
{
    UpsState st;
    st.step = 0.0;
    CHECK_THROWS_AS(UpsGovernor{st}, Error);
    UpsState tol;
    tol.ipc_tolerance = 1.0;
    CHECK_THROWS_AS(UpsGovernor{tol}, Error);
    UpsState start;
    start.current_freq = 3e9;
    CHECK_THROWS_AS(UpsGovernor{start}, Error);
}

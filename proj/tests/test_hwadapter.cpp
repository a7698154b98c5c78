/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include <sys/stat.h>
#include <unistd.h>

#include <cstdlib>

#include "doctest.h"
#include "fake_sysfs.hpp"
#include "ufs/error.hpp"
#include "ufs/governor.hpp"
#include "ufs/hwadapter.hpp"

using namespace ufs;
using fakesys::slurp;

TEST_CASE("GHz to kHz conversion")
{
    CHECK(hz_to_khz(2.2e9) == 2200000);
    CHECK(hz_to_khz(0.8e9) == 800000);
    CHECK(hz_to_khz(1.5e9) == 1500000);
    for (int step = 8; step <= 22; ++step) {
        CHECK(hz_to_khz(step * 0.1e9) == static_cast<std::uint64_t>(step) * 100000);
    }
    CHECK_THROWS_AS(hz_to_khz(-1.0), Error);
}

TEST_CASE("discovery honours UFS_SYSFS_BASE")
{
    fakesys::Tree tree(2);
    ::setenv("UFS_SYSFS_BASE", tree.root().c_str(), 1);
    CHECK(UncoreDomain::default_base() == tree.root());
    auto domains = UncoreDomain::discover(UncoreDomain::default_base());
    REQUIRE(domains.size() == 2);
    CHECK(domains[0].dir() == tree.die(0));
    CHECK(domains[1].dir() == tree.die(1));
    ::unsetenv("UFS_SYSFS_BASE");
    CHECK(UncoreDomain::default_base() == "/sys/devices/system/cpu/intel_uncore_frequency");
    CHECK_THROWS_AS(UncoreDomain(tree.root() / "uncore00"), Error);
}

TEST_CASE("apply pins min and max to the same value")
{
    fakesys::Tree tree;
    UncoreDomain dom(tree.die());
    auto confirm = dom.apply({2.2e9, CommandCause::high_freq_lock});
    CHECK(confirm.min_khz == 2200000);
    CHECK(confirm.max_khz == 2200000);
    CHECK(slurp(tree.die() / "min_freq_khz") == "2200000\n");
    CHECK(slurp(tree.die() / "max_freq_khz") == "2200000\n");

    dom.apply({0.8e9, CommandCause::trend_decrease});
    CHECK(slurp(tree.die() / "min_freq_khz") == "800000\n");
    CHECK(slurp(tree.die() / "max_freq_khz") == "800000\n");

    dom.apply({1.3e9, CommandCause::step_up});
    CHECK(dom.read_min_khz() == 1300000);
    CHECK(dom.read_max_khz() == 1300000);
}

TEST_CASE("apply is idempotent")
{
    fakesys::Tree tree;
    UncoreDomain dom(tree.die());
    dom.apply({1.8e9, CommandCause::fixed});
    auto min_a = slurp(tree.die() / "min_freq_khz");
    auto max_a = slurp(tree.die() / "max_freq_khz");
    dom.apply({1.8e9, CommandCause::fixed});
    CHECK(slurp(tree.die() / "min_freq_khz") == min_a);
    CHECK(slurp(tree.die() / "max_freq_khz") == max_a);
}

TEST_CASE("targets outside the advertised range are rejected untouched")
{
    fakesys::Tree tree;
    UncoreDomain dom(tree.die());
    for (double f : {0.7e9, 2.3e9}) {
        try {
            dom.apply({f, CommandCause::fixed});
            FAIL("expected a hardware reject");
        }
        catch (const Error &ex) {
            CHECK(ex.kind() == ErrorKind::hardware_reject);
        }
    }
    CHECK(slurp(tree.die() / "min_freq_khz") == "800000\n");
    CHECK(slurp(tree.die() / "max_freq_khz") == "2200000\n");
}

TEST_CASE("missing write permission surfaces an actuation error with a hint")
{
    fakesys::Tree tree;
    UncoreDomain dom(tree.die());
    ::chmod((tree.die() / "min_freq_khz").c_str(), 0444);
    ::chmod((tree.die() / "max_freq_khz").c_str(), 0444);
    ::chmod(tree.die().c_str(), 0755);
    // root ignores mode bits, so drop to an unprivileged user for the check.
    const bool was_root = ::geteuid() == 0;
    if (was_root) {
        REQUIRE(::seteuid(65534) == 0);
    }
    bool writable = dom.writable();
    std::string message;
    ErrorKind kind = ErrorKind::source;
    try {
        dom.apply({1.0e9, CommandCause::fixed});
    }
    catch (const Error &ex) {
        kind = ex.kind();
        message = ex.what();
    }
    if (was_root) {
        REQUIRE(::seteuid(0) == 0);
    }
    CHECK(!writable);
    CHECK(kind == ErrorKind::actuation);
    CHECK(message.find("permission denied") != std::string::npos);
    CHECK(message.find("udev") != std::string::npos);
}

TEST_CASE("throughput from a byte counter")
{
    CHECK(throughput_between({1000000000, 0.0}, {2000000000, 0.1}).throughput == doctest::Approx(1e10));
    CHECK(throughput_between({5, 0.0}, {5, 0.1}).throughput == 0.0);
    try {
        throughput_between({5, 0.0}, {0, 0.1});
        FAIL("expected counter reset");
    }
    catch (const Error &ex) {
        CHECK(ex.kind() == ErrorKind::counter_reset);
    }
    CHECK_THROWS_AS(throughput_between({5, 0.1}, {6, 0.1}), Error);
}

TEST_CASE("reader re-arms after a counter reset")
{
    fakesys::Tree tree;
    ThroughputReader reader{CounterFile(tree.counter())};
    tree.set_counter(1000);
    CHECK(!reader.sample(0.0));
    tree.set_counter(1000000000);
    auto s = reader.sample(0.1);
    REQUIRE(s);
    CHECK(s->throughput == doctest::Approx((1e9 - 1000) / 0.1));
    tree.set_counter(0);
    CHECK_THROWS_AS(reader.sample(0.2), Error);
    tree.set_counter(500000000);
    auto after = reader.sample(0.3);
    REQUIRE(after);
    CHECK(after->throughput == doctest::Approx(5e9));

    fakesys::put(tree.counter(), "garbage\n");
    try {
        reader.sample(0.4);
        FAIL("expected a source error");
    }
    catch (const Error &ex) {
        CHECK(ex.kind() == ErrorKind::source);
    }
}

TEST_CASE("control loop actuates at most once per round")
{
    fakesys::Tree tree;
    HardwareController ctl(UncoreDomain(tree.die()), ThroughputReader(CounterFile(tree.counter())),
                           std::make_unique<MagusGovernor>(GovernorConfig{}));
    ctl.start(0.0);
    CHECK(slurp(tree.die() / "max_freq_khz") == "800000\n");
    std::uint64_t bytes = 0;
    for (int k = 1; k <= 60; ++k) {
        // Alternate 1 GB/s and 20 GB/s, then settle.
        double rate = (k < 40 && k % 2 == 0) ? 2e10 : 1e9;
        bytes += static_cast<std::uint64_t>(rate * 0.1);
        tree.set_counter(bytes);
        auto before = ctl.stats().actuations;
        auto cmd = ctl.round(0.1 * k);
        CHECK(ctl.stats().actuations - before <= 1);
        if (cmd) {
            CHECK(slurp(tree.die() / "min_freq_khz") == std::to_string(hz_to_khz(cmd->target)) + "\n");
            CHECK(slurp(tree.die() / "max_freq_khz") == std::to_string(hz_to_khz(cmd->target)) + "\n");
        }
    }
    CHECK(ctl.stats().rounds == 60);
    CHECK(ctl.stats().actuations >= 2);
    CHECK(ctl.stats().discarded == 0);

    tree.set_counter(0);
    CHECK(!ctl.round(6.1));
    CHECK(ctl.stats().discarded == 1);
    CHECK(ctl.stats().rounds == 60);
}

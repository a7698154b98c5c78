/*
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef UFS_HWADAPTER_HPP_INCLUDE
#define UFS_HWADAPTER_HPP_INCLUDE

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "ufs/policy.hpp"

namespace ufs
{
    /// Nearest whole kHz of a frequency in Hz.
    std::uint64_t hz_to_khz(double hz);

    /// Values read back from a domain after pinning it.
    struct PinConfirmation
    {
        std::uint64_t min_khz;
        std::uint64_t max_khz;
    };

    /// One directory of the Linux intel_uncore_frequency sysfs interface,
    /// e.g. /sys/devices/system/cpu/intel_uncore_frequency/package_00_die_00.
    class UncoreDomain
    {
        public:
            /// Throws Error(source) unless min_freq_khz and max_freq_khz exist.
            explicit UncoreDomain(std::filesystem::path dir);

            /// $UFS_SYSFS_BASE if set, else the kernel's default location.
            static std::filesystem::path default_base(void);
            /// All `package_*_die_*` directories under base, sorted by name.
            static std::vector<UncoreDomain> discover(const std::filesystem::path &base);

            const std::filesystem::path &dir(void) const noexcept { return m_dir; }
            std::uint64_t read_min_khz(void) const;
            std::uint64_t read_max_khz(void) const;
            /// initial_{min,max}_freq_khz: the range the hardware advertises.
            std::optional<std::pair<std::uint64_t, std::uint64_t>> hardware_limits_khz(void) const;
            /// Both control files can be opened for writing by this process.
            bool writable(void) const;
            /// Pin the domain to cmd.target by writing it to both
            /// min_freq_khz and max_freq_khz, then read both back.
            /// Throws Error(hardware_reject) for a target outside the
            /// advertised range or a read-back mismatch, Error(actuation)
            /// when a write fails (with a hint on permission errors).
            PinConfirmation apply(const FrequencyCommand &cmd) const;

        private:
            std::filesystem::path m_dir;
    };

    /// ASCII decimal cumulative byte counter, e.g. an exported memory
    /// controller traffic counter.
    class CounterFile
    {
        public:
            explicit CounterFile(std::filesystem::path path);
            /// Throws Error(source) if unreadable or not a decimal count.
            std::uint64_t read(void) const;
            const std::filesystem::path &path(void) const noexcept { return m_path; }

        private:
            std::filesystem::path m_path;
    };

    struct CounterReading
    {
        std::uint64_t count;
        double timestamp;
    };

    /// (count_now - count_prev) / (t_now - t_prev). Throws
    /// Error(counter_reset) if the counter went backwards and
    /// Error(ordering) unless time moved forward.
    ThroughputSample throughput_between(const CounterReading &prev, const CounterReading &now);

    /// Turns successive counter reads into throughput samples.
    class ThroughputReader
    {
        public:
            explicit ThroughputReader(CounterFile counter);

            /// The first call only arms the baseline and returns nothing. On a
            /// counter reset the baseline is re-armed to the new reading and
            /// Error(counter_reset) is thrown; the caller skips the round.
            std::optional<ThroughputSample> sample(double now);

        private:
            CounterFile m_counter;
            std::optional<CounterReading> m_prev;
    };

    struct HardwareLoopStats
    {
        std::uint64_t rounds = 0;
        std::uint64_t actuations = 0;
        std::uint64_t discarded = 0;
    };

    /// The governor decision loop bound to one uncore domain. Time is
    /// supplied by the caller so the loop can be driven by a real clock or
    /// by a test.
    class HardwareController
    {
        public:
            HardwareController(UncoreDomain domain, ThroughputReader reader,
                               std::unique_ptr<Governor> governor);

            /// Parks the domain at the governor's initial frequency and arms
            /// the throughput baseline.
            void start(double now);
            /// One sampling period. Writes to the domain only when the target
            /// differs from what is applied, so at most once per call.
            std::optional<FrequencyCommand> round(double now);
            const HardwareLoopStats &stats(void) const noexcept { return m_stats; }
            double applied(void) const noexcept { return m_applied; }

        private:
            UncoreDomain m_domain;
            ThroughputReader m_reader;
            std::unique_ptr<Governor> m_governor;
            HardwareLoopStats m_stats;
            double m_applied = 0.0;
            double m_start = 0.0;
    };
}

#endif

/*
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef UFS_POLICY_HPP_INCLUDE
#define UFS_POLICY_HPP_INCLUDE

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ufs/telemetry.hpp"

namespace ufs
{
    enum class CommandCause
    {
        trend_increase,
        trend_decrease,
        hold,
        high_freq_lock,
        // baseline governors
        fixed,
        power_bound,
        phase_reset,
        step_down,
        step_up,
    };

    std::string_view to_string(CommandCause cause);
    std::optional<CommandCause> cause_from_string(std::string_view text);

    /// Actuator message: the frequency to run the uncore at (Hz) and why.
    struct FrequencyCommand
    {
        double target;
        CommandCause cause;

        bool operator==(const FrequencyCommand &other) const = default;
    };

    /// Package and DRAM power over the last sampling period (watts).
    struct PowerSample
    {
        double timestamp;
        double package_power;
        double dram_power;
    };

    /// Socket-aggregate instructions per cycle over the last sampling period.
    struct IpcSample
    {
        double timestamp;
        double ipc;
    };

    /// Everything a governor may read at the end of one sampling period.
    /// MAGUS only uses the throughput; baselines use power and IPC.
    struct Observation
    {
        ThroughputSample throughput;
        std::optional<PowerSample> power;
        std::optional<IpcSample> ipc;
    };

    /// Common decision interface for the MAGUS governor and the baselines.
    class Governor
    {
        public:
            virtual ~Governor() = default;
            virtual std::string name(void) const = 0;
            /// Frequency in force before the first decision round.
            virtual double initial_frequency(void) const = 0;
            virtual FrequencyCommand decide(const Observation &obs) = 0;
            /// Fresh instance with the same configuration and initial state.
            virtual std::unique_ptr<Governor> clone_fresh(void) const = 0;
    };
}

#endif

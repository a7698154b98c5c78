/*
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef UFS_SIMSYS_HPP_INCLUDE
#define UFS_SIMSYS_HPP_INCLUDE

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ufs/baselines.hpp"
#include "ufs/policy.hpp"
#include "ufs/telemetry.hpp"

namespace ufs
{
    enum class BandwidthShape
    {
        linear,
        saturating,
    };

    std::string_view to_string(BandwidthShape shape);
    std::optional<BandwidthShape> bandwidth_shape_from_string(std::string_view text);

    /// Achievable memory throughput as a function of uncore frequency.
    struct BandwidthModel
    {
        double bw_max = 2e10;
        BandwidthShape shape = BandwidthShape::linear;
        /// Saturating only: fraction of f_max above which bandwidth is flat.
        double knee = 1.0;

        void validate(void) const;
    };

    struct PowerModel
    {
        double p_uncore_min = 10.0;
        double p_uncore_max = 40.0;
        double exponent = 1.0;
        double p_core_active = 50.0;
        double p_pkg_idle = 60.0;
        double p_gpu_active = 250.0;
        double p_gpu_idle = 30.0;

        void validate(void) const;
        /// Node power with nothing running: package idle + GPU idle.
        double idle_power(void) const noexcept { return p_pkg_idle + p_gpu_idle; }
    };

    struct SimModels
    {
        FrequencyRange range;
        BandwidthModel bandwidth;
        PowerModel power;
        /// DRAM power proxy fed to the baselines, watts per GB/s achieved.
        double dram_watts_per_gbps = 0.5;
        /// IPC when no memory stall dilates the step.
        double ipc_nominal = 1.0;
        /// Divergence guard; 0 selects 1000 ticks per trace entry + 1000.
        std::uint64_t max_ticks = 0;

        void validate(void) const;
    };

    /// Linear: bw_max * f / f_max. Saturating: bw_max * min(1, (f / f_max) / knee).
    /// Throws Error(range) for a frequency outside [f_min, f_max].
    double bandwidth_at(double freq, const BandwidthModel &model, double f_min, double f_max);
    /// p_min + (p_max - p_min) * ((f - f_min) / (f_max - f_min))^exponent.
    double uncore_power_at(double freq, const PowerModel &model, double f_min, double f_max);

    /// One sampling period of the closed loop.
    struct TickRecord
    {
        double t;           ///< tick start, seconds
        double dt;          ///< tick length; shorter than the period only for the final tick
        double freq;        ///< uncore frequency in force, Hz
        double achieved;    ///< time-weighted achieved throughput, bytes/s
        double demand;      ///< time-weighted demand of the entries worked on, bytes/s
        double pkg_power;   ///< watts
        double gpu_power;   ///< watts
        double dram_power;  ///< watts, proxy
        double ipc;
    };

    struct CommandRecord
    {
        double t;
        FrequencyCommand command;
    };

    struct SimResult
    {
        std::string governor;
        double exec_time = 0.0;
        double pkg_energy = 0.0;
        double gpu_energy = 0.0;
        double total_energy = 0.0;
        double dram_energy = 0.0;
        double mean_pkg_power = 0.0;
        double edp = 0.0;
        std::size_t entries_completed = 0;
        double work_completed = 0.0;
        std::vector<CommandRecord> command_log;
        std::vector<TickRecord> ticks;

        bool operator==(const SimResult &other) const;
    };

    /// Progress of one trace entry over a time budget at a fixed frequency.
    struct EntryAdvance
    {
        double progress;  ///< fraction of the entry completed, <= remaining
        double elapsed;   ///< seconds consumed, <= budget
        double achieved;  ///< min(demand, bandwidth)
        double rate;      ///< compute_weight + (1 - compute_weight) * achieved / demand
    };

    /// The compute_weight part of the entry runs at full speed, the memory
    /// part at achieved/demand; an undilated entry takes exactly `period`.
    EntryAdvance advance_entry(const TraceEntry &entry, double remaining, double freq,
                               const SimModels &models, double period, double budget);

    /// Discrete-time closed loop: each tick runs the trace at the frequency
    /// in force, then shows the governor what happened and applies its
    /// command for the next tick.
    class Simulator
    {
        public:
            /// Throws Error(parameter) for an invalid trace or models.
            Simulator(const WorkloadTrace &trace, Governor &governor, const SimModels &models);

            bool done(void) const noexcept { return m_entry == m_trace.entries.size(); }
            /// Runs one tick. Returns the command issued at its end, or
            /// nothing when the trace finished during the tick.
            std::optional<FrequencyCommand> step(void);
            SimResult finish(void);
            const std::vector<TickRecord> &ticks(void) const noexcept { return m_result.ticks; }

        private:
            const WorkloadTrace &m_trace;
            Governor &m_governor;
            SimModels m_models;
            double m_freq;
            std::size_t m_entry = 0;
            double m_remaining = 1.0;
            std::uint64_t m_tick = 0;
            std::uint64_t m_max_ticks;
            SimResult m_result;
    };

    /// Runs the whole trace. Deterministic. Throws Error(divergence) when
    /// the tick cap is hit.
    SimResult run(const WorkloadTrace &trace, Governor &governor, const SimModels &models);
}

#endif

/*
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef UFS_BASELINES_HPP_INCLUDE
#define UFS_BASELINES_HPP_INCLUDE

#include <optional>

#include "ufs/policy.hpp"

namespace ufs
{
    /// Hardware frequency range shared by all governors (hertz).
    struct FrequencyRange
    {
        double f_min = 0.8e9;
        double f_max = 2.2e9;
    };

    /// Emits one fixed frequency every round.
    class StaticGovernor : public Governor
    {
        public:
            /// Throws Error(config) when freq is outside the range.
            StaticGovernor(double freq, const FrequencyRange &range);

            std::string name(void) const override;
            double initial_frequency(void) const override;
            FrequencyCommand decide(const Observation &obs) override;
            std::unique_ptr<Governor> clone_fresh(void) const override;

        private:
            double m_freq;
            FrequencyRange m_range;
    };

    /// Intel's out-of-the-box behaviour: the uncore stays at f_max and only
    /// drops to f_min while package + DRAM power is within `margin` of TDP.
    class TdpDefaultGovernor : public Governor
    {
        public:
            TdpDefaultGovernor(double tdp, double margin, const FrequencyRange &range);

            std::string name(void) const override;
            double initial_frequency(void) const override;
            /// Throws Error(stale_data) without a power sample; the last
            /// command stays in force (see last_command()).
            FrequencyCommand decide(const Observation &obs) override;
            std::unique_ptr<Governor> clone_fresh(void) const override;
            FrequencyCommand last_command(void) const noexcept { return m_last; }
            /// Power at or above which the governor backs off.
            double power_bound(void) const noexcept { return (1.0 - m_margin) * m_tdp; }

        private:
            double m_tdp;
            double m_margin;
            FrequencyRange m_range;
            FrequencyCommand m_last;
    };

    /// Parameters and running state of the UPS-style baseline. This is an
    /// approximation of Uncore Power Scavenger built from its published
    /// description (DRAM-power phase detection, IPC-guarded gradual
    /// descent); step size and tolerances are not taken from its authors.
    struct UpsState
    {
        FrequencyRange range;
        double current_freq = 2.2e9;
        /// Reference readings of the current phase; unset until the first round.
        std::optional<double> ref_ipc;
        std::optional<double> ref_dram_power;
        double step = 0.1e9;
        double ipc_tolerance = 0.02;
        double dram_delta_threshold = 0.2;

        /// Throws Error(config) when an invariant is broken.
        void validate(void) const;
    };

    class UpsGovernor : public Governor
    {
        public:
            explicit UpsGovernor(const UpsState &initial);

            std::string name(void) const override;
            double initial_frequency(void) const override;
            /// Each round:
            ///  - |dram - ref_dram| / max(ref_dram, eps) > dram_delta_threshold:
            ///    phase change, jump to f_max and re-baseline both references;
            ///  - else ipc >= (1 - ipc_tolerance) * ref_ipc: one step down;
            ///  - else one step up.
            /// The first round only records the references. Throws
            /// Error(stale_data) when power or IPC is missing.
            FrequencyCommand decide(const Observation &obs) override;
            std::unique_ptr<Governor> clone_fresh(void) const override;
            const UpsState &state(void) const noexcept { return m_state; }

            static constexpr double M_DRAM_EPSILON = 1e-3;

        private:
            UpsState m_initial;
            UpsState m_state;
    };
}

#endif

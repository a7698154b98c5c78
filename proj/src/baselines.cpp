/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ufs/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "ufs/error.hpp"

namespace ufs
{
    namespace
    {
        void check_range(const FrequencyRange &range)
        {
            if (!(range.f_min > 0.0) || !(range.f_min < range.f_max) || !std::isfinite(range.f_max)) {
                throw Error(ErrorKind::config, "frequency range requires 0 < f_min < f_max");
            }
        }
    }

    StaticGovernor::StaticGovernor(double freq, const FrequencyRange &range)
        : m_freq(freq)
        , m_range(range)
    {
        check_range(range);
        if (!(freq >= range.f_min && freq <= range.f_max)) {
            throw Error(ErrorKind::config, "static governor frequency " + format_double(freq) +
                        " Hz outside [" + format_double(range.f_min) + ", " +
                        format_double(range.f_max) + "]");
        }
    }

    std::string StaticGovernor::name(void) const
    {
        if (m_freq == m_range.f_max) {
            return "static_max";
        }
        if (m_freq == m_range.f_min) {
            return "static_min";
        }
        return "static_" + format_double(m_freq / 1e9) + "ghz";
    }

    double StaticGovernor::initial_frequency(void) const
    {
        return m_freq;
    }

    FrequencyCommand StaticGovernor::decide(const Observation &)
    {
        return {m_freq, CommandCause::fixed};
    }

    std::unique_ptr<Governor> StaticGovernor::clone_fresh(void) const
    {
        return std::make_unique<StaticGovernor>(*this);
    }

    TdpDefaultGovernor::TdpDefaultGovernor(double tdp, double margin, const FrequencyRange &range)
        : m_tdp(tdp)
        , m_margin(margin)
        , m_range(range)
        , m_last{range.f_max, CommandCause::fixed}
    {
        check_range(range);
        if (!(tdp > 0.0) || !std::isfinite(tdp)) {
            throw Error(ErrorKind::config, "tdp must be positive");
        }
        if (!(margin > 0.0 && margin < 1.0)) {
            throw Error(ErrorKind::config, "tdp margin must be in (0, 1)");
        }
    }

    std::string TdpDefaultGovernor::name(void) const
    {
        return "tdp_default";
    }

    double TdpDefaultGovernor::initial_frequency(void) const
    {
        return m_range.f_max;
    }

    FrequencyCommand TdpDefaultGovernor::decide(const Observation &obs)
    {
        if (!obs.power) {
            throw Error(ErrorKind::stale_data, "tdp_default: no power sample for this round");
        }
        double power = obs.power->package_power + obs.power->dram_power;
        if (power < power_bound()) {
            m_last = {m_range.f_max, CommandCause::fixed};
        }
        else {
            m_last = {m_range.f_min, CommandCause::power_bound};
        }
        return m_last;
    }

    std::unique_ptr<Governor> TdpDefaultGovernor::clone_fresh(void) const
    {
        return std::make_unique<TdpDefaultGovernor>(m_tdp, m_margin, m_range);
    }

    void UpsState::validate(void) const
    {
        check_range(range);
        if (!(current_freq >= range.f_min && current_freq <= range.f_max)) {
            throw Error(ErrorKind::config, "ups: current_freq outside [f_min, f_max]");
        }
        if (!(step > 0.0) || !std::isfinite(step)) {
            throw Error(ErrorKind::config, "ups: step must be positive");
        }
        if (!(ipc_tolerance > 0.0 && ipc_tolerance < 1.0)) {
            throw Error(ErrorKind::config, "ups: ipc_tolerance must be in (0, 1)");
        }
        if (!(dram_delta_threshold > 0.0 && dram_delta_threshold < 1.0)) {
            throw Error(ErrorKind::config, "ups: dram_delta_threshold must be in (0, 1)");
        }
    }

    UpsGovernor::UpsGovernor(const UpsState &initial)
        : m_initial(initial)
        , m_state(initial)
    {
        m_initial.validate();
    }

    std::string UpsGovernor::name(void) const
    {
        return "ups";
    }

    double UpsGovernor::initial_frequency(void) const
    {
        return m_initial.current_freq;
    }

    FrequencyCommand UpsGovernor::decide(const Observation &obs)
    {
        if (!obs.power || !obs.ipc) {
            throw Error(ErrorKind::stale_data, "ups: missing power or IPC sample for this round");
        }
        double dram = obs.power->dram_power;
        double ipc = obs.ipc->ipc;
        auto &st = m_state;
        if (!st.ref_dram_power || !st.ref_ipc) {
            st.ref_dram_power = dram;
            st.ref_ipc = ipc;
            return {st.current_freq, CommandCause::fixed};
        }

        double delta = std::fabs(dram - *st.ref_dram_power) /
                       std::max(*st.ref_dram_power, M_DRAM_EPSILON);
        if (delta > st.dram_delta_threshold) {
            st.current_freq = st.range.f_max;
            st.ref_dram_power = dram;
            st.ref_ipc = ipc;
            return {st.current_freq, CommandCause::phase_reset};
        }
        if (ipc >= (1.0 - st.ipc_tolerance) * *st.ref_ipc) {
            st.current_freq = std::max(st.range.f_min, std::round(st.current_freq - st.step));
            return {st.current_freq, CommandCause::step_down};
        }
        st.current_freq = std::min(st.range.f_max, std::round(st.current_freq + st.step));
        return {st.current_freq, CommandCause::step_up};
    }

    std::unique_ptr<Governor> UpsGovernor::clone_fresh(void) const
    {
        return std::make_unique<UpsGovernor>(m_initial);
    }
}

/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ufs/policy.hpp"

#include <array>
#include <utility>

namespace ufs
{
    namespace
    {
        constexpr std::array<std::pair<CommandCause, std::string_view>, 9> M_CAUSE_NAMES{{
            {CommandCause::trend_increase, "TrendIncrease"},
            {CommandCause::trend_decrease, "TrendDecrease"},
            {CommandCause::hold, "Hold"},
            {CommandCause::high_freq_lock, "HighFreqLock"},
            {CommandCause::fixed, "Fixed"},
            {CommandCause::power_bound, "PowerBound"},
            {CommandCause::phase_reset, "PhaseReset"},
            {CommandCause::step_down, "StepDown"},
            {CommandCause::step_up, "StepUp"},
        }};
    }

    std::string_view to_string(CommandCause cause)
    {
        for (const auto &[value, text] : M_CAUSE_NAMES) {
            if (value == cause) {
                return text;
            }
        }
        return "Unknown";
    }

    std::optional<CommandCause> cause_from_string(std::string_view text)
    {
        for (const auto &[value, name] : M_CAUSE_NAMES) {
            if (name == text) {
                return value;
            }
        }
        return std::nullopt;
    }
}

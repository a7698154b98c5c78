/*
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef UFS_GOVERNOR_HPP_INCLUDE
#define UFS_GOVERNOR_HPP_INCLUDE

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ufs/policy.hpp"
#include "ufs/telemetry.hpp"

namespace ufs
{
    /// A single problem found while checking a configuration. `location`
    /// names the offending key.
    struct ConfigDiagnostic
    {
        std::string location;
        std::string message;
    };

    /// Tuning knobs of the MAGUS policy. Units are SI: bytes/s per second
    /// for the thresholds, seconds, hertz. The thresholds, window lengths and
    /// sampling period are defaults of this implementation; the frequency
    /// bounds match a Xeon Platinum 8380 uncore (0.8 to 2.2 GHz).
    struct GovernorConfig
    {
        double inc_threshold = 1e9;
        double dec_threshold = -1e9;
        double direv_length = 0.1;
        std::size_t history_capacity = 10;
        double high_freq_threshold = 0.6;
        std::size_t tune_log_capacity = 10;
        double f_min = 0.8e9;
        double f_max = 2.2e9;
        double sample_period = 0.1;

        /// Every broken invariant, keyed by config-file key name.
        std::vector<ConfigDiagnostic> diagnostics(void) const;
        /// Throws Error(config) listing every broken invariant.
        void validate(void) const;
    };

    /// Config-file key names, in file order.
    const std::vector<std::string_view> &governor_config_keys(void);
    /// Set one key from its text form (GB/s per s, seconds, GHz, counts).
    /// Throws Error(config) for an unknown key or unparsable value.
    void apply_governor_setting(GovernorConfig &config, std::string_view key, std::string_view value);
    /// Parse `key = value` lines; `#` starts a comment. Does not validate.
    GovernorConfig parse_governor_config(std::istream &source);
    GovernorConfig read_governor_config_file(const std::filesystem::path &path);
    void write_governor_config(std::ostream &sink, const GovernorConfig &config);

    /// Outcome of the trend predictor.
    enum class TrendSignal : int
    {
        decrease = -1,
        hold = 0,
        increase = 1,
    };

    std::string_view to_string(TrendSignal signal);

    /// Fixed-capacity FIFO of tune-event flags with an O(1) running sum.
    class TuneEventLog
    {
        public:
            explicit TuneEventLog(std::size_t capacity);

            void push(bool event);
            std::size_t capacity(void) const noexcept { return m_flags.size(); }
            std::size_t size(void) const noexcept { return m_size; }
            bool full(void) const noexcept { return m_size == m_flags.size(); }
            bool empty(void) const noexcept { return m_size == 0; }
            std::size_t sum(void) const noexcept { return m_sum; }
            /// Flags oldest first.
            std::vector<std::uint8_t> flags(void) const;

        private:
            std::vector<std::uint8_t> m_flags;
            std::size_t m_head = 0;
            std::size_t m_size = 0;
            std::size_t m_sum = 0;
    };

    /// True once the history holds two samples spanning the derivative
    /// window (allowing half a sample period of timing jitter).
    bool trend_ready(const GovernorConfig &config, const HistoryWindow &history);
    /// (newest - oldest in the trailing direv_length window) / direv_length.
    /// Throws Error(not_ready) when !trend_ready().
    double throughput_derivative(const GovernorConfig &config, const HistoryWindow &history);
    /// Increase iff derivative > inc_threshold, decrease iff < dec_threshold.
    TrendSignal predict_trend(const GovernorConfig &config, const HistoryWindow &history);
    void record_tune_event(TuneEventLog &log, TrendSignal signal);
    /// sum(flags) / len(flags) >= high_freq_threshold. Throws
    /// Error(not_ready) on an empty log.
    bool detect_high_freq(const GovernorConfig &config, const TuneEventLog &log);
    /// Aggressive mapping: increase jumps to f_max, decrease to f_min.
    double target_frequency(TrendSignal signal, const GovernorConfig &config, double current);

    struct GovernorState
    {
        GovernorConfig config;
        HistoryWindow history;
        TuneEventLog tune_log;
        double current_target;
        bool in_high_freq;
        std::uint64_t rounds;
        /// Rounds in which the predictor ran and a tune flag was logged.
        std::uint64_t events_recorded;
    };

    /// Validated initial state: empty buffers, uncore parked at f_min.
    GovernorState new_governor(const GovernorConfig &config);
    /// One decision round: push, predict, log, detect, override, emit.
    FrequencyCommand decide(GovernorState &state, const ThroughputSample &sample);

    class MagusGovernor : public Governor
    {
        public:
            explicit MagusGovernor(const GovernorConfig &config);

            std::string name(void) const override;
            double initial_frequency(void) const override;
            FrequencyCommand decide(const Observation &obs) override;
            FrequencyCommand decide(const ThroughputSample &sample);
            std::unique_ptr<Governor> clone_fresh(void) const override;
            const GovernorState &state(void) const noexcept { return m_state; }

        private:
            GovernorState m_state;
    };
}

#endif

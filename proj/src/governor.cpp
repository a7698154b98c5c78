/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ufs/governor.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "ufs/error.hpp"

namespace ufs
{
    std::vector<ConfigDiagnostic> GovernorConfig::diagnostics(void) const
    {
        std::vector<ConfigDiagnostic> result;
        auto add = [&result](const char *key, std::string msg) {
            result.push_back({key, std::move(msg)});
        };
        if (!(inc_threshold > 0.0) || !std::isfinite(inc_threshold)) {
            add("inc_threshold_gbps_per_s", "must be positive");
        }
        if (!(dec_threshold < 0.0) || !std::isfinite(dec_threshold)) {
            add("dec_threshold_gbps_per_s", "must be negative");
        }
        if (!(direv_length > 0.0) || !std::isfinite(direv_length)) {
            add("direv_length_s", "must be positive");
        }
        if (history_capacity < 2) {
            add("history_capacity", "must be at least 2");
        }
        if (!(high_freq_threshold > 0.0 && high_freq_threshold <= 1.0)) {
            add("high_freq_threshold", "must be in (0, 1]");
        }
        if (tune_log_capacity < 1) {
            add("tune_log_capacity", "must be at least 1");
        }
        if (!(f_min > 0.0) || !std::isfinite(f_min)) {
            add("f_min_ghz", "must be positive");
        }
        if (!(f_max > 0.0) || !std::isfinite(f_max)) {
            add("f_max_ghz", "must be positive");
        }
        if (!(f_min < f_max)) {
            add("f_min_ghz", "f_min must be below f_max");
        }
        if (!(sample_period > 0.0) || !std::isfinite(sample_period)) {
            add("sample_period_s", "must be positive");
        }
        else if (history_capacity >= 2 && direv_length > 0.0) {
            // The window can only ever span (capacity - 1) periods.
            double span = static_cast<double>(history_capacity - 1) * sample_period;
            if (direv_length > span * (1.0 + 1e-9)) {
                add("direv_length_s", "exceeds the span of the history window, (history_capacity - 1) * sample_period = " +
                    format_double(span) + " s");
            }
        }
        return result;
    }

    void GovernorConfig::validate(void) const
    {
        auto diags = diagnostics();
        if (!diags.empty()) {
            std::string msg = "invalid governor configuration:";
            for (const auto &diag : diags) {
                msg += " " + diag.location + ": " + diag.message + ";";
            }
            msg.pop_back();
            throw Error(ErrorKind::config, msg);
        }
    }

    const std::vector<std::string_view> &governor_config_keys(void)
    {
        static const std::vector<std::string_view> keys = {
            "inc_threshold_gbps_per_s",
            "dec_threshold_gbps_per_s",
            "direv_length_s",
            "history_capacity",
            "high_freq_threshold",
            "tune_log_capacity",
            "f_min_ghz",
            "f_max_ghz",
            "sample_period_s",
        };
        return keys;
    }

    namespace
    {
        double parse_real(std::string_view key, std::string_view value)
        {
            double result = 0.0;
            std::string_view text = value;
            if (!text.empty() && text.front() == '+') {
                text.remove_prefix(1);
            }
            auto res = std::from_chars(text.data(), text.data() + text.size(), result);
            if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() ||
                !std::isfinite(result)) {
                throw Error(ErrorKind::config, std::string(key) + ": not a number: '" + std::string(value) + "'");
            }
            return result;
        }

        // GB/s and GHz share the 1e9 decimal scaling of parse_gbps().
        double parse_giga(std::string_view key, std::string_view value)
        {
            try {
                return parse_gbps(value);
            }
            catch (const Error &) {
                throw Error(ErrorKind::config, std::string(key) + ": not a number: '" + std::string(value) + "'");
            }
        }

        std::size_t parse_count(std::string_view key, std::string_view value)
        {
            std::size_t result = 0;
            auto res = std::from_chars(value.data(), value.data() + value.size(), result);
            if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size()) {
                throw Error(ErrorKind::config, std::string(key) + ": not a non-negative integer: '" +
                            std::string(value) + "'");
            }
            return result;
        }

        std::string_view trim(std::string_view text)
        {
            const auto first = text.find_first_not_of(" \t\r");
            if (first == std::string_view::npos) {
                return {};
            }
            return text.substr(first, text.find_last_not_of(" \t\r") - first + 1);
        }
    }

    void apply_governor_setting(GovernorConfig &config, std::string_view key, std::string_view value)
    {
        value = trim(value);
        if (key == "inc_threshold_gbps_per_s") {
            config.inc_threshold = parse_giga(key, value);
        }
        else if (key == "dec_threshold_gbps_per_s") {
            config.dec_threshold = parse_giga(key, value);
        }
        else if (key == "direv_length_s") {
            config.direv_length = parse_real(key, value);
        }
        else if (key == "history_capacity") {
            config.history_capacity = parse_count(key, value);
        }
        else if (key == "high_freq_threshold") {
            config.high_freq_threshold = parse_real(key, value);
        }
        else if (key == "tune_log_capacity") {
            config.tune_log_capacity = parse_count(key, value);
        }
        else if (key == "f_min_ghz") {
            config.f_min = parse_giga(key, value);
        }
        else if (key == "f_max_ghz") {
            config.f_max = parse_giga(key, value);
        }
        else if (key == "sample_period_s") {
            config.sample_period = parse_real(key, value);
        }
        else {
            throw Error(ErrorKind::config, "unknown governor config key '" + std::string(key) + "'");
        }
    }

    GovernorConfig parse_governor_config(std::istream &source)
    {
        GovernorConfig config;
        std::string raw;
        std::size_t line_no = 0;
        while (std::getline(source, raw)) {
            ++line_no;
            std::string_view line = raw;
            line = trim(line.substr(0, line.find('#')));
            if (line.empty()) {
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ParseError(line_no, "expected key = value");
            }
            try {
                apply_governor_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1));
            }
            catch (const Error &ex) {
                throw ParseError(line_no, ex.what());
            }
        }
        return config;
    }

    GovernorConfig read_governor_config_file(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in) {
            throw Error(ErrorKind::source, "cannot open governor config " + path.string());
        }
        try {
            return parse_governor_config(in);
        }
        catch (const ParseError &ex) {
            throw ParseError(ex.line(), ex.detail(), path.string());
        }
    }

    void write_governor_config(std::ostream &sink, const GovernorConfig &config)
    {
        sink << "inc_threshold_gbps_per_s = " << format_gbps(config.inc_threshold) << '\n'
             << "dec_threshold_gbps_per_s = " << format_gbps(config.dec_threshold) << '\n'
             << "direv_length_s = " << format_double(config.direv_length) << '\n'
             << "history_capacity = " << config.history_capacity << '\n'
             << "high_freq_threshold = " << format_double(config.high_freq_threshold) << '\n'
             << "tune_log_capacity = " << config.tune_log_capacity << '\n'
             << "f_min_ghz = " << format_gbps(config.f_min) << '\n'
             << "f_max_ghz = " << format_gbps(config.f_max) << '\n'
             << "sample_period_s = " << format_double(config.sample_period) << '\n';
    }

    std::string_view to_string(TrendSignal signal)
    {
        switch (signal) {
            case TrendSignal::increase: return "increase";
            case TrendSignal::decrease: return "decrease";
            case TrendSignal::hold: return "hold";
        }
        return "unknown";
    }

    TuneEventLog::TuneEventLog(std::size_t capacity)
        : m_flags(capacity, 0)
    {
        if (capacity == 0) {
            throw Error(ErrorKind::parameter, "TuneEventLog: capacity must be positive");
        }
    }

    void TuneEventLog::push(bool event)
    {
        std::size_t tail = (m_head + m_size) % m_flags.size();
        if (full()) {
            m_sum -= m_flags[m_head];
            m_head = (m_head + 1) % m_flags.size();
        }
        else {
            ++m_size;
        }
        m_flags[tail] = event ? 1 : 0;
        m_sum += m_flags[tail];
    }

    std::vector<std::uint8_t> TuneEventLog::flags(void) const
    {
        std::vector<std::uint8_t> result;
        result.reserve(m_size);
        for (std::size_t idx = 0; idx < m_size; ++idx) {
            result.push_back(m_flags[(m_head + idx) % m_flags.size()]);
        }
        return result;
    }

    namespace
    {
        double jitter_allowance(const GovernorConfig &config)
        {
            return 0.5 * config.sample_period;
        }
    }

    bool trend_ready(const GovernorConfig &config, const HistoryWindow &history)
    {
        if (history.size() < 2) {
            return false;
        }
        double span = history.newest().timestamp - history.oldest().timestamp;
        return span >= config.direv_length - jitter_allowance(config);
    }

    double throughput_derivative(const GovernorConfig &config, const HistoryWindow &history)
    {
        if (!trend_ready(config, history)) {
            throw Error(ErrorKind::not_ready,
                        "throughput_derivative(): history does not yet span the derivative window");
        }
        const auto &newest = history.newest();
        double cutoff = newest.timestamp - config.direv_length - jitter_allowance(config);
        // Scan backwards from the second newest so a late newest sample still
        // pairs with its predecessor.
        std::size_t first = history.size() - 2;
        while (first > 0 && history[first - 1].timestamp >= cutoff) {
            --first;
        }
        return (newest.throughput - history[first].throughput) / config.direv_length;
    }

    TrendSignal predict_trend(const GovernorConfig &config, const HistoryWindow &history)
    {
        double derivative = throughput_derivative(config, history);
        if (derivative > config.inc_threshold) {
            return TrendSignal::increase;
        }
        if (derivative < config.dec_threshold) {
            return TrendSignal::decrease;
        }
        return TrendSignal::hold;
    }

    void record_tune_event(TuneEventLog &log, TrendSignal signal)
    {
        log.push(signal != TrendSignal::hold);
    }

    bool detect_high_freq(const GovernorConfig &config, const TuneEventLog &log)
    {
        if (log.empty()) {
            throw Error(ErrorKind::not_ready, "detect_high_freq(): tune log is empty");
        }
        double rate = static_cast<double>(log.sum()) / static_cast<double>(log.size());
        return rate >= config.high_freq_threshold;
    }

    double target_frequency(TrendSignal signal, const GovernorConfig &config, double current)
    {
        switch (signal) {
            case TrendSignal::increase: return config.f_max;
            case TrendSignal::decrease: return config.f_min;
            case TrendSignal::hold: break;
        }
        return current;
    }

    GovernorState new_governor(const GovernorConfig &config)
    {
        config.validate();
        return GovernorState{
            config,
            HistoryWindow(config.history_capacity),
            TuneEventLog(config.tune_log_capacity),
            config.f_min,
            false,
            0,
            0,
        };
    }

    FrequencyCommand decide(GovernorState &state, const ThroughputSample &sample)
    {
        state.history.push(sample);
        ++state.rounds;

        // Warm-up rounds log nothing so they cannot dilute the event rate.
        TrendSignal signal = TrendSignal::hold;
        if (trend_ready(state.config, state.history)) {
            signal = predict_trend(state.config, state.history);
            record_tune_event(state.tune_log, signal);
            ++state.events_recorded;
        }

        bool high_freq = state.tune_log.full() && detect_high_freq(state.config, state.tune_log);
        FrequencyCommand cmd{};
        if (high_freq) {
            cmd = {state.config.f_max, CommandCause::high_freq_lock};
        }
        else {
            cmd.target = target_frequency(signal, state.config, state.current_target);
            switch (signal) {
                case TrendSignal::increase: cmd.cause = CommandCause::trend_increase; break;
                case TrendSignal::decrease: cmd.cause = CommandCause::trend_decrease; break;
                case TrendSignal::hold: cmd.cause = CommandCause::hold; break;
            }
        }
        state.current_target = cmd.target;
        state.in_high_freq = high_freq;
        return cmd;
    }

    MagusGovernor::MagusGovernor(const GovernorConfig &config)
        : m_state(new_governor(config))
    {

    }

    std::string MagusGovernor::name(void) const
    {
        return "magus";
    }

    double MagusGovernor::initial_frequency(void) const
    {
        return m_state.config.f_min;
    }

    FrequencyCommand MagusGovernor::decide(const Observation &obs)
    {
        return ufs::decide(m_state, obs.throughput);
    }

    FrequencyCommand MagusGovernor::decide(const ThroughputSample &sample)
    {
        return ufs::decide(m_state, sample);
    }

    std::unique_ptr<Governor> MagusGovernor::clone_fresh(void) const
    {
        return std::make_unique<MagusGovernor>(m_state.config);
    }
}

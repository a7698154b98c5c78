/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ufs/telemetry.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "ufs/error.hpp"

namespace ufs
{
    HistoryWindow::HistoryWindow(std::size_t capacity)
        : m_capacity(capacity)
    {
        if (capacity == 0) {
            throw Error(ErrorKind::parameter, "HistoryWindow: capacity must be positive");
        }
    }

    void HistoryWindow::push(const ThroughputSample &sample)
    {
        if (!std::isfinite(sample.throughput) || sample.throughput < 0.0) {
            throw Error(ErrorKind::parameter,
                        "HistoryWindow::push(): throughput must be finite and non-negative, got " +
                        format_double(sample.throughput));
        }
        if (!std::isfinite(sample.timestamp) || sample.timestamp < 0.0) {
            throw Error(ErrorKind::parameter,
                        "HistoryWindow::push(): timestamp must be finite and non-negative");
        }
        if (!m_samples.empty() && !(sample.timestamp > m_samples.back().timestamp)) {
            throw Error(ErrorKind::ordering,
                        "HistoryWindow::push(): timestamp " + format_double(sample.timestamp) +
                        " does not follow newest " + format_double(m_samples.back().timestamp));
        }
        if (m_samples.size() == m_capacity) {
            m_samples.pop_front();
        }
        m_samples.push_back(sample);
    }

    void HistoryWindow::clear(void)
    {
        m_samples.clear();
    }

    void WorkloadTrace::validate(void) const
    {
        if (!(period > 0.0) || !std::isfinite(period)) {
            throw Error(ErrorKind::parameter, "trace '" + name + "': period must be positive");
        }
        if (entries.empty()) {
            throw Error(ErrorKind::parameter, "trace '" + name + "': no entries");
        }
        for (std::size_t idx = 0; idx < entries.size(); ++idx) {
            const auto &entry = entries[idx];
            if (!std::isfinite(entry.demand) || entry.demand < 0.0) {
                throw Error(ErrorKind::parameter, "trace '" + name + "': step " +
                            std::to_string(idx) + " has negative or non-finite demand");
            }
            if (!(entry.compute_weight >= 0.0 && entry.compute_weight <= 1.0)) {
                throw Error(ErrorKind::parameter, "trace '" + name + "': step " +
                            std::to_string(idx) + " has compute_weight outside [0,1]");
            }
        }
    }

    double WorkloadTrace::duration(void) const
    {
        return static_cast<double>(entries.size()) * period;
    }

    namespace
    {
        constexpr std::string_view M_HEADER = "step,demand_gbps,compute_weight";

        std::string_view trim(std::string_view text)
        {
            const auto first = text.find_first_not_of(" \t\r");
            if (first == std::string_view::npos) {
                return {};
            }
            const auto last = text.find_last_not_of(" \t\r");
            return text.substr(first, last - first + 1);
        }

        bool parse_full(std::string_view text, double &value)
        {
            if (text.empty()) {
                return false;
            }
            // from_chars rejects a leading '+', accept it for hand-written files
            if (text.front() == '+') {
                text.remove_prefix(1);
            }
            auto res = std::from_chars(text.data(), text.data() + text.size(), value);
            return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(value);
        }

        bool parse_full(std::string_view text, long long &value)
        {
            if (text.empty()) {
                return false;
            }
            auto res = std::from_chars(text.data(), text.data() + text.size(), value);
            return res.ec == std::errc() && res.ptr == text.data() + text.size();
        }

        std::vector<std::string_view> split_fields(std::string_view line)
        {
            std::vector<std::string_view> fields;
            std::size_t start = 0;
            while (true) {
                auto comma = line.find(',', start);
                fields.push_back(trim(line.substr(start, comma - start)));
                if (comma == std::string_view::npos) {
                    break;
                }
                start = comma + 1;
            }
            return fields;
        }
    }

    std::string format_double(double value)
    {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), value);
        return std::string(buf, res.ptr);
    }

    double parse_gbps(std::string_view text)
    {
        double gbps = 0.0;
        if (!parse_full(text, gbps)) {
            throw Error(ErrorKind::parse, "not a finite number: '" + std::string(text) + "'");
        }
        // Shift the decimal exponent by 9 on the text so the bytes/s value is
        // the correctly rounded reading of the written decimal.
        std::string scaled(text.front() == '+' ? text.substr(1) : text);
        auto epos = scaled.find_first_of("eE");
        if (epos == std::string::npos) {
            scaled += "e9";
        }
        else {
            long long exponent = 0;
            std::string_view exp_text(scaled);
            exp_text.remove_prefix(epos + 1);
            if (!exp_text.empty() && exp_text.front() == '+') {
                exp_text.remove_prefix(1);
            }
            if (!parse_full(exp_text, exponent)) {
                throw Error(ErrorKind::parse, "bad exponent in '" + std::string(text) + "'");
            }
            scaled = scaled.substr(0, epos) + "e" + std::to_string(exponent + 9);
        }
        double bytes = 0.0;
        auto res = std::from_chars(scaled.data(), scaled.data() + scaled.size(), bytes);
        if (res.ec != std::errc() || !std::isfinite(bytes)) {
            throw Error(ErrorKind::parse, "out of range: '" + std::string(text) + "'");
        }
        return bytes;
    }

    std::string format_gbps(double bytes_per_sec)
    {
        std::string candidate = format_double(bytes_per_sec / 1e9);
        if (parse_gbps(candidate) == bytes_per_sec) {
            return candidate;
        }
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), bytes_per_sec, std::chars_format::scientific);
        std::string sci(buf, res.ptr);
        auto epos = sci.find('e');
        long long exponent = std::stoll(sci.substr(epos + 1));
        return sci.substr(0, epos) + "e" + std::to_string(exponent - 9);
    }

    WorkloadTrace read_trace(std::istream &source)
    {
        WorkloadTrace trace;
        trace.name = "trace";
        bool have_header = false;
        long long last_step = -1;
        std::string raw;
        std::size_t line_no = 0;
        while (std::getline(source, raw)) {
            ++line_no;
            std::string_view line = trim(raw);
            if (line.empty()) {
                continue;
            }
            if (line.front() == '#') {
                auto body = trim(line.substr(1));
                auto eq = body.find('=');
                if (eq == std::string_view::npos) {
                    continue;
                }
                auto key = trim(body.substr(0, eq));
                auto value = trim(body.substr(eq + 1));
                if (key == "period") {
                    if (!parse_full(value, trace.period) || !(trace.period > 0.0)) {
                        throw ParseError(line_no, "period must be a positive number");
                    }
                }
                else if (key == "name") {
                    trace.name = std::string(value);
                }
                continue;
            }
            if (!have_header) {
                if (line != M_HEADER) {
                    throw ParseError(line_no, "missing header '" + std::string(M_HEADER) + "'");
                }
                have_header = true;
                continue;
            }
            auto fields = split_fields(line);
            if (fields.size() != 3) {
                throw ParseError(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
            }
            long long step = 0;
            if (!parse_full(fields[0], step) || step <= last_step) {
                throw ParseError(line_no, "step must be an integer greater than the previous step");
            }
            last_step = step;
            TraceEntry entry{};
            try {
                entry.demand = parse_gbps(fields[1]);
            }
            catch (const Error &ex) {
                throw ParseError(line_no, std::string("demand_gbps: ") + ex.what());
            }
            if (entry.demand < 0.0) {
                throw ParseError(line_no, "negative demand");
            }
            if (!parse_full(fields[2], entry.compute_weight)) {
                throw ParseError(line_no, "compute_weight is not a number");
            }
            if (!(entry.compute_weight >= 0.0 && entry.compute_weight <= 1.0)) {
                throw ParseError(line_no, "compute_weight outside [0,1]");
            }
            trace.entries.push_back(entry);
        }
        if (!have_header) {
            throw ParseError(line_no, "missing header '" + std::string(M_HEADER) + "'");
        }
        if (trace.entries.empty()) {
            throw ParseError(line_no, "no entries");
        }
        return trace;
    }

    WorkloadTrace read_trace_file(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in) {
            throw Error(ErrorKind::source, "cannot open trace file " + path.string());
        }
        try {
            return read_trace(in);
        }
        catch (const ParseError &ex) {
            throw ParseError(ex.line(), ex.detail(), path.string());
        }
    }

    void write_trace(std::ostream &sink, const WorkloadTrace &trace)
    {
        sink << "# name=" << trace.name << '\n'
             << "# period=" << format_double(trace.period) << '\n'
             << M_HEADER << '\n';
        for (std::size_t idx = 0; idx < trace.entries.size(); ++idx) {
            const auto &entry = trace.entries[idx];
            sink << idx << ',' << format_gbps(entry.demand) << ','
                 << format_double(entry.compute_weight) << '\n';
        }
    }

    void write_trace_file(const std::filesystem::path &path, const WorkloadTrace &trace)
    {
        std::ofstream out(path);
        if (!out) {
            throw Error(ErrorKind::source, "cannot write trace file " + path.string());
        }
        write_trace(out, trace);
    }

    namespace
    {
        void check_levels(const char *func, double low, double high, double period, double compute_weight)
        {
            if (!(low >= 0.0) || !(high >= low) || !std::isfinite(high)) {
                throw Error(ErrorKind::parameter, std::string(func) + "(): require 0 <= low <= high");
            }
            if (!(period > 0.0) || !std::isfinite(period)) {
                throw Error(ErrorKind::parameter, std::string(func) + "(): period must be positive");
            }
            if (!(compute_weight >= 0.0 && compute_weight <= 1.0)) {
                throw Error(ErrorKind::parameter, std::string(func) + "(): compute_weight outside [0,1]");
            }
        }

        WorkloadTrace alternate(std::string name, double low, double high, std::size_t block,
                                std::size_t total, double period, double compute_weight)
        {
            WorkloadTrace trace;
            trace.name = std::move(name);
            trace.period = period;
            trace.entries.reserve(total);
            for (std::size_t idx = 0; idx < total; ++idx) {
                bool is_high = (idx / block) % 2 == 1;
                trace.entries.push_back({is_high ? high : low, compute_weight});
            }
            return trace;
        }
    }

    WorkloadTrace synth_phase_alternating(double low, double high,
                                          std::size_t phase_len, std::size_t total,
                                          double period, double compute_weight)
    {
        check_levels(__func__, low, high, period, compute_weight);
        if (phase_len == 0 || total == 0) {
            throw Error(ErrorKind::parameter, "synth_phase_alternating(): phase_len and total must be >= 1");
        }
        return alternate("phase_alternating", low, high, phase_len, total, period, compute_weight);
    }

    WorkloadTrace synth_oscillating(double low, double high,
                                    std::size_t toggle_every, std::size_t total,
                                    double period, double compute_weight)
    {
        check_levels(__func__, low, high, period, compute_weight);
        if (toggle_every == 0 || total == 0) {
            throw Error(ErrorKind::parameter, "synth_oscillating(): toggle_every and total must be >= 1");
        }
        return alternate("oscillating", low, high, toggle_every, total, period, compute_weight);
    }

    WorkloadTrace synth_training_spikes(double base, double spike,
                                        std::size_t spike_len, std::size_t cycle_len,
                                        std::size_t cycles, double period,
                                        double compute_weight)
    {
        if (!(base >= 0.0) || !(spike >= 0.0) || !std::isfinite(base) || !std::isfinite(spike)) {
            throw Error(ErrorKind::parameter, "synth_training_spikes(): demands must be non-negative");
        }
        check_levels(__func__, 0.0, 0.0, period, compute_weight);
        if (spike_len >= cycle_len) {
            throw Error(ErrorKind::parameter, "synth_training_spikes(): spike_len must be less than cycle_len");
        }
        if (cycles == 0) {
            throw Error(ErrorKind::parameter, "synth_training_spikes(): cycles == 0 yields an empty trace");
        }
        WorkloadTrace trace;
        trace.name = "training_spikes";
        trace.period = period;
        trace.entries.reserve(cycle_len * cycles);
        for (std::size_t cycle = 0; cycle < cycles; ++cycle) {
            for (std::size_t pos = 0; pos < cycle_len; ++pos) {
                trace.entries.push_back({pos < spike_len ? spike : base, compute_weight});
            }
        }
        return trace;
    }

    WorkloadTrace concat_traces(std::string name, const std::vector<WorkloadTrace> &parts)
    {
        if (parts.empty()) {
            throw Error(ErrorKind::parameter, "concat_traces(): nothing to concatenate");
        }
        WorkloadTrace result;
        result.name = std::move(name);
        result.period = parts.front().period;
        for (const auto &part : parts) {
            if (part.period != result.period) {
                throw Error(ErrorKind::parameter, "concat_traces(): segments use different periods");
            }
            result.entries.insert(result.entries.end(), part.entries.begin(), part.entries.end());
        }
        return result;
    }
}

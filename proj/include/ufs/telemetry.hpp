/*
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef UFS_TELEMETRY_HPP_INCLUDE
#define UFS_TELEMETRY_HPP_INCLUDE

#include <cstddef>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ufs
{
    /// One memory-throughput reading. Timestamp is seconds since run start,
    /// throughput is bytes/second.
    struct ThroughputSample
    {
        double timestamp;
        double throughput;

        bool operator==(const ThroughputSample &other) const = default;
    };

    /// Fixed-capacity FIFO of throughput samples, oldest first.
    class HistoryWindow
    {
        public:
            using const_iterator = std::deque<ThroughputSample>::const_iterator;

            explicit HistoryWindow(std::size_t capacity);

            /// Append a sample, evicting the oldest one when full. Throws
            /// Error(ordering) unless the timestamp is strictly newer than
            /// the newest held sample, Error(parameter) for a negative or
            /// non-finite throughput.
            void push(const ThroughputSample &sample);
            void clear(void);

            std::size_t capacity(void) const noexcept { return m_capacity; }
            std::size_t size(void) const noexcept { return m_samples.size(); }
            bool empty(void) const noexcept { return m_samples.empty(); }
            bool full(void) const noexcept { return m_samples.size() == m_capacity; }
            const ThroughputSample &oldest(void) const { return m_samples.front(); }
            const ThroughputSample &newest(void) const { return m_samples.back(); }
            const ThroughputSample &operator[](std::size_t idx) const { return m_samples[idx]; }
            const_iterator begin(void) const { return m_samples.begin(); }
            const_iterator end(void) const { return m_samples.end(); }

        private:
            std::size_t m_capacity;
            std::deque<ThroughputSample> m_samples;
    };

    /// One trace step: memory-throughput demand in bytes/second and the
    /// fraction of the step that does not depend on uncore frequency.
    struct TraceEntry
    {
        double demand;
        double compute_weight;

        bool operator==(const TraceEntry &other) const = default;
    };

    struct WorkloadTrace
    {
        std::string name;
        double period = 0.1;
        std::vector<TraceEntry> entries;

        /// Throws Error(parameter) when any invariant is broken.
        void validate(void) const;
        /// Undilated duration: entries × period.
        double duration(void) const;

        bool operator==(const WorkloadTrace &other) const = default;
    };

    /// CSV trace format:
    ///
    ///     # name=<identifier>
    ///     # period=<seconds>
    ///     step,demand_gbps,compute_weight
    ///     0,1.5,0.25
    ///
    /// Other `#` lines are ignored. A missing period defaults to 0.1 s.
    /// Demand is GB/s in the file (1 GB/s = 1e9 bytes/s) and bytes/s in memory;
    /// the conversion is done on the decimal text so a write/read round trip
    /// reproduces every double exactly.
    WorkloadTrace read_trace(std::istream &source);
    WorkloadTrace read_trace_file(const std::filesystem::path &path);
    void write_trace(std::ostream &sink, const WorkloadTrace &trace);
    void write_trace_file(const std::filesystem::path &path, const WorkloadTrace &trace);

    /// GB/s text <-> bytes/s with exact decimal scaling.
    double parse_gbps(std::string_view text);
    std::string format_gbps(double bytes_per_sec);
    /// Shortest text that reads back to the same double.
    std::string format_double(double value);

    /// Blocks of `phase_len` steps at `low`, then `high`, repeated until
    /// `total` steps have been emitted.
    WorkloadTrace synth_phase_alternating(double low, double high,
                                          std::size_t phase_len, std::size_t total,
                                          double period, double compute_weight = 0.0);
    /// Demand toggles between `low` and `high` every `toggle_every` steps.
    WorkloadTrace synth_oscillating(double low, double high,
                                    std::size_t toggle_every, std::size_t total,
                                    double period, double compute_weight = 0.0);
    /// `cycles` cycles of `cycle_len` steps; the first `spike_len` steps of
    /// each cycle run at `spike`, the rest at `base`.
    WorkloadTrace synth_training_spikes(double base, double spike,
                                        std::size_t spike_len, std::size_t cycle_len,
                                        std::size_t cycles, double period,
                                        double compute_weight = 0.0);
    /// Concatenate traces that share a period.
    WorkloadTrace concat_traces(std::string name, const std::vector<WorkloadTrace> &parts);
}

#endif

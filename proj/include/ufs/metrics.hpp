/*
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef UFS_METRICS_HPP_INCLUDE
#define UFS_METRICS_HPP_INCLUDE

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ufs
{
    struct SimResult;

    /// Percentage increase in execution time; a speedup is negative.
    double perf_loss(double time, double time_base);
    /// 100 * (base - value) / base. Savings are never clamped.
    double power_saving(double power, double power_base);
    double energy_saving(double energy, double energy_base);
    double edp(double energy, double time);
    double edp_saving(double edp_value, double edp_base);
    /// Saving computed after subtracting the fixed idle power from both sides.
    double active_saving(double power, double power_base, double power_idle);

    /// Outcome of one run, either simulated or measured.
    struct RunMetrics
    {
        double exec_time = 0.0;
        double pkg_energy = 0.0;
        double gpu_energy = 0.0;
        double total_energy = 0.0;
        /// Time-weighted: pkg_energy / exec_time.
        double mean_pkg_power = 0.0;
        double edp = 0.0;

        /// Fills total_energy, mean_pkg_power and edp from the primaries.
        static RunMetrics from_primaries(double exec_time, double pkg_energy, double gpu_energy);
    };

    RunMetrics summarize(const SimResult &result);
    /// Mean of repeated runs with the single fastest and slowest dropped
    /// (when at least three runs are given). Identical runs are returned
    /// unchanged.
    RunMetrics trimmed_mean(const std::vector<RunMetrics> &runs);

    struct ComparisonReport
    {
        std::string governor;
        std::string baseline;
        double perf_loss_pct = 0.0;
        double pkg_power_saving_pct = 0.0;
        double energy_saving_pct = 0.0;
        double edp_saving_pct = 0.0;
        std::optional<double> active_power_saving_pct;
        std::optional<double> active_energy_saving_pct;
    };

    /// All metrics of `run` against `base`. Active savings are filled in
    /// only when an idle power is supplied.
    ComparisonReport compare(const std::string &governor, const RunMetrics &run,
                             const std::string &baseline, const RunMetrics &base,
                             std::optional<double> idle_power = std::nullopt);

    nlohmann::ordered_json to_json(const ComparisonReport &report);
    nlohmann::ordered_json to_json(const RunMetrics &metrics);
    /// `metric,value_pct` rows in a fixed order; absent active savings are
    /// written with an empty value.
    void write_report_csv(std::ostream &sink, const ComparisonReport &report);
}

#endif

/*
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef UFS_EXPERIMENT_HPP_INCLUDE
#define UFS_EXPERIMENT_HPP_INCLUDE

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ufs/baselines.hpp"
#include "ufs/governor.hpp"
#include "ufs/metrics.hpp"
#include "ufs/simsys.hpp"
#include "ufs/telemetry.hpp"

namespace ufs
{
    struct TdpParams
    {
        double tdp = 270.0;
        double margin = 0.05;
    };

    struct UpsParams
    {
        double step = 0.1e9;
        double ipc_tolerance = 0.02;
        double dram_delta_threshold = 0.2;
    };

    /// A fully resolved scenario file: the workload, the models, and the
    /// parameters of every governor it may run.
    struct Scenario
    {
        std::string name;
        WorkloadTrace trace;
        SimModels models;
        GovernorConfig governor_config;
        TdpParams tdp;
        UpsParams ups;
        std::vector<std::string> governors;
        std::string baseline;
        std::optional<double> idle_power;
        std::size_t repeats = 1;
        std::filesystem::path output_dir;
    };

    /// magus, static_min, static_max, tdp_default, ups.
    const std::vector<std::string_view> &governor_names(void);

    /// Every problem in a scenario document. Relative paths resolve against
    /// `base_dir`.
    std::vector<ConfigDiagnostic> check_scenario(const nlohmann::json &doc,
                                                 const std::filesystem::path &base_dir);
    /// Throws Error(config) with every diagnostic when the document is invalid.
    Scenario parse_scenario(const nlohmann::json &doc, const std::filesystem::path &base_dir);
    Scenario load_scenario(const std::filesystem::path &path);
    /// Diagnostics for a scenario (.json) or governor config (key = value)
    /// file, including I/O and syntax problems.
    std::vector<ConfigDiagnostic> validate_config_file(const std::filesystem::path &path);

    /// Throws Error(config) naming the valid governors for an unknown name.
    std::unique_ptr<Governor> make_governor(std::string_view name, const Scenario &scenario);

    struct ExperimentPlan
    {
        Scenario scenario;
        std::vector<std::string> governors;
        std::size_t baseline = 0;
        std::size_t repeats = 1;
        /// Empty: nothing is written.
        std::filesystem::path output_dir;

        void validate(void) const;
    };

    /// Plan from a scenario's own governor list, baseline and output dir.
    ExperimentPlan plan_from_scenario(Scenario scenario);

    struct ExperimentOutcome
    {
        std::vector<SimResult> runs;
        std::vector<RunMetrics> metrics;
        std::vector<ComparisonReport> reports;
        nlohmann::ordered_json report;
    };

    /// Runs every governor (independent runs in parallel), compares each to
    /// the baseline, and writes report.json, metrics_<g>.csv,
    /// timeline_<g>.csv and commands_<g>.csv plus the aligned
    /// throughput.csv and frequency.csv.
    ExperimentOutcome run_experiment(const ExperimentPlan &plan);

    /// Timeline files on a common time grid of `period` steps covering the
    /// longest run. Cells past the end of a shorter run are left empty.
    void emit_timeline(const std::filesystem::path &dir, const std::vector<SimResult> &runs, double period);
    void write_commands_csv(const std::filesystem::path &path, const SimResult &run);
}

#endif

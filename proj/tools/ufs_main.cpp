/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "ufs/error.hpp"
#include "ufs/experiment.hpp"
#include "ufs/hwadapter.hpp"

namespace
{
    constexpr int M_EXIT_CONFIG = 2;
    constexpr int M_EXIT_DIVERGENCE = 3;

    int exit_code_for(const ufs::Error &ex)
    {
        switch (ex.kind()) {
            case ufs::ErrorKind::config:
            case ufs::ErrorKind::parse:
                return M_EXIT_CONFIG;
            case ufs::ErrorKind::divergence:
                return M_EXIT_DIVERGENCE;
            default:
                return 1;
        }
    }

    struct RunArgs
    {
        std::string scenario;
        std::vector<std::string> governors;
        std::string baseline;
        std::string out;
        std::size_t repeats = 0;
    };

    void print_table(const ufs::ExperimentOutcome &outcome)
    {
        std::printf("%-12s %10s %10s %10s %10s %10s\n", "governor", "time_s", "perf_loss",
                    "pkg_pwr", "energy", "edp");
        for (std::size_t idx = 0; idx < outcome.reports.size(); ++idx) {
            const auto &rep = outcome.reports[idx];
            std::printf("%-12s %10.3f %9.2f%% %9.2f%% %9.2f%% %9.2f%%\n", rep.governor.c_str(),
                        outcome.metrics[idx].exec_time, rep.perf_loss_pct, rep.pkg_power_saving_pct,
                        rep.energy_saving_pct, rep.edp_saving_pct);
        }
    }

    int cmd_run(const RunArgs &args)
    {
        auto scenario = ufs::load_scenario(args.scenario);
        if (!args.governors.empty()) {
            scenario.governors = args.governors;
        }
        if (!args.baseline.empty()) {
            scenario.baseline = args.baseline;
        }
        if (args.repeats > 0) {
            scenario.repeats = args.repeats;
        }
        if (!args.out.empty()) {
            scenario.output_dir = args.out;
        }
        auto plan = ufs::plan_from_scenario(std::move(scenario));
        auto outcome = ufs::run_experiment(plan);
        print_table(outcome);
        if (!plan.output_dir.empty()) {
            std::printf("wrote %s\n", (plan.output_dir / "report.json").c_str());
        }
        return 0;
    }

    struct GenArgs
    {
        std::string kind;
        std::string name;
        // Kept as text so the GB/s to bytes/s scaling is exact.
        std::string low_gbps = "4";
        std::string high_gbps = "18";
        std::string base_gbps = "12";
        std::string spike_gbps = "20";
        std::size_t phase_len = 20;
        std::size_t toggle_every = 1;
        std::size_t total = 200;
        std::size_t spike_len = 2;
        std::size_t cycle_len = 10;
        std::size_t cycles = 20;
        double period = 0.1;
        double compute_weight = 0.0;
        std::string out;
    };

    int cmd_trace_gen(const GenArgs &args)
    {
        ufs::WorkloadTrace trace;
        if (args.kind == "phase_alternating") {
            trace = ufs::synth_phase_alternating(ufs::parse_gbps(args.low_gbps), ufs::parse_gbps(args.high_gbps),
                                                 args.phase_len, args.total, args.period, args.compute_weight);
        }
        else if (args.kind == "oscillating") {
            trace = ufs::synth_oscillating(ufs::parse_gbps(args.low_gbps), ufs::parse_gbps(args.high_gbps),
                                           args.toggle_every, args.total, args.period, args.compute_weight);
        }
        else {
            trace = ufs::synth_training_spikes(ufs::parse_gbps(args.base_gbps), ufs::parse_gbps(args.spike_gbps),
                                               args.spike_len, args.cycle_len, args.cycles, args.period,
                                               args.compute_weight);
        }
        if (!args.name.empty()) {
            trace.name = args.name;
        }
        if (args.out.empty()) {
            ufs::write_trace(std::cout, trace);
        }
        else {
            ufs::write_trace_file(args.out, trace);
        }
        return 0;
    }

    int cmd_validate(const std::vector<std::string> &paths)
    {
        std::size_t problems = 0;
        for (const auto &path : paths) {
            for (const auto &diag : ufs::validate_config_file(path)) {
                std::printf("%s: %s: %s\n", path.c_str(), diag.location.c_str(), diag.message.c_str());
                ++problems;
            }
        }
        if (problems == 0) {
            std::printf("ok\n");
            return 0;
        }
        return M_EXIT_CONFIG;
    }

    struct HwArgs
    {
        bool enabled = false;
        std::string governor_config;
        std::string counter;
        std::string domain;
        std::size_t rounds = 0;
        double period = 0.0;
    };

    int cmd_hw_run(const HwArgs &args)
    {
        if (!args.enabled) {
            std::fprintf(stderr, "hw run changes uncore frequency on this machine; pass --hw to confirm\n");
            return M_EXIT_CONFIG;
        }
        ufs::GovernorConfig config;
        if (!args.governor_config.empty()) {
            config = ufs::read_governor_config_file(args.governor_config);
        }
        config.validate();
        const double period = args.period > 0.0 ? args.period : config.sample_period;

        std::optional<ufs::UncoreDomain> domain;
        if (!args.domain.empty()) {
            domain.emplace(args.domain);
        }
        else {
            auto base = ufs::UncoreDomain::default_base();
            auto found = ufs::UncoreDomain::discover(base);
            if (found.empty()) {
                throw ufs::Error(ufs::ErrorKind::source, "no uncore domains under " + base.string());
            }
            domain.emplace(found.front());
        }
        if (!domain->writable()) {
            throw ufs::Error(ufs::ErrorKind::actuation, "cannot write " + domain->dir().string() +
                             ": run as root or grant write access (chown/chmod or a udev rule)");
        }

        ufs::HardwareController ctl(*domain, ufs::ThroughputReader(ufs::CounterFile(args.counter)),
                                    std::make_unique<ufs::MagusGovernor>(config));
        using clock = std::chrono::steady_clock;
        const auto origin = clock::now();
        auto seconds = [&origin]() {
            return std::chrono::duration<double>(clock::now() - origin).count();
        };
        ctl.start(seconds());
        const auto step = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(period));
        auto next = origin;
        for (std::size_t round = 0; args.rounds == 0 || round < args.rounds; ++round) {
            next += step;
            std::this_thread::sleep_until(next);
            if (auto cmd = ctl.round(seconds())) {
                std::printf("%.3f %s %s\n", seconds(), ufs::format_gbps(cmd->target).c_str(),
                            std::string(ufs::to_string(cmd->cause)).c_str());
                std::fflush(stdout);
            }
        }
        const auto &st = ctl.stats();
        std::printf("rounds=%llu actuations=%llu discarded=%llu\n",
                    static_cast<unsigned long long>(st.rounds), static_cast<unsigned long long>(st.actuations),
                    static_cast<unsigned long long>(st.discarded));
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Uncore frequency governor simulator and runtime"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto *run = app.add_subcommand("run", "Run a governor comparison on a scenario");
    run->add_option("--scenario", run_args.scenario, "Scenario JSON file")->required();
    run->add_option("--governor", run_args.governors, "Governors to run")->delimiter(',');
    run->add_option("--baseline", run_args.baseline, "Baseline governor for savings");
    run->add_option("--out", run_args.out, "Output directory");
    run->add_option("--repeats", run_args.repeats, "Runs per governor")->check(CLI::PositiveNumber);

    GenArgs gen_args;
    auto *trace = app.add_subcommand("trace", "Workload trace tools");
    trace->require_subcommand(1);
    auto *gen = trace->add_subcommand("gen", "Generate a synthetic trace");
    gen->add_option("--kind", gen_args.kind, "Generator")
        ->required()
        ->check(CLI::IsMember({"phase_alternating", "oscillating", "training_spikes"}));
    gen->add_option("--name", gen_args.name, "Trace name");
    gen->add_option("--low-gbps", gen_args.low_gbps, "Low demand, GB/s");
    gen->add_option("--high-gbps", gen_args.high_gbps, "High demand, GB/s");
    gen->add_option("--base-gbps", gen_args.base_gbps, "Baseline demand between spikes, GB/s");
    gen->add_option("--spike-gbps", gen_args.spike_gbps, "Spike demand, GB/s");
    gen->add_option("--phase-len", gen_args.phase_len, "Steps per phase");
    gen->add_option("--toggle-every", gen_args.toggle_every, "Steps between toggles");
    gen->add_option("--total", gen_args.total, "Total steps");
    gen->add_option("--spike-len", gen_args.spike_len, "Steps per spike");
    gen->add_option("--cycle-len", gen_args.cycle_len, "Steps per cycle");
    gen->add_option("--cycles", gen_args.cycles, "Number of cycles");
    gen->add_option("--period", gen_args.period, "Step length, seconds");
    gen->add_option("--compute-weight", gen_args.compute_weight, "Frequency-insensitive fraction");
    gen->add_option("--out", gen_args.out, "Output CSV (stdout if omitted)");

    std::vector<std::string> validate_paths;
    auto *validate = app.add_subcommand("validate", "Check scenario or governor config files");
    validate->add_option("paths", validate_paths, "Files to check")->required();

    HwArgs hw_args;
    auto *hw = app.add_subcommand("hw", "Hardware control loop");
    hw->require_subcommand(1);
    auto *hw_run = hw->add_subcommand("run", "Drive an uncore domain from a byte counter");
    hw_run->add_flag("--hw", hw_args.enabled, "Confirm hardware actuation");
    hw_run->add_option("--governor-config", hw_args.governor_config, "Governor config (key = value)");
    hw_run->add_option("--counter", hw_args.counter, "Cumulative byte counter file")->required();
    hw_run->add_option("--domain", hw_args.domain, "Uncore domain directory");
    hw_run->add_option("--rounds", hw_args.rounds, "Stop after this many rounds (0: run forever)");
    hw_run->add_option("--period", hw_args.period, "Sampling period, seconds");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &ex) {
        int code = app.exit(ex);
        return code == 0 ? 0 : M_EXIT_CONFIG;
    }

    try {
        if (*run) {
            return cmd_run(run_args);
        }
        if (*gen) {
            return cmd_trace_gen(gen_args);
        }
        if (*validate) {
            return cmd_validate(validate_paths);
        }
        if (*hw_run) {
            return cmd_hw_run(hw_args);
        }
    }
    catch (const ufs::Error &ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return exit_code_for(ex);
    }
    catch (const std::exception &ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}

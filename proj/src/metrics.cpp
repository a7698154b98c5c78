/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ufs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ufs/error.hpp"
#include "ufs/simsys.hpp"

namespace ufs
{
    namespace
    {
        void require_positive(double base, const char *what)
        {
            if (!(base > 0.0) || !std::isfinite(base)) {
                throw Error(ErrorKind::parameter, std::string(what) + ": baseline must be positive");
            }
        }

        double relative_saving(double value, double base)
        {
            return 100.0 * (base - value) / base;
        }
    }

    double perf_loss(double time, double time_base)
    {
        require_positive(time_base, "perf_loss");
        return 100.0 * (time - time_base) / time_base;
    }

    double power_saving(double power, double power_base)
    {
        require_positive(power_base, "power_saving");
        return relative_saving(power, power_base);
    }

    double energy_saving(double energy, double energy_base)
    {
        require_positive(energy_base, "energy_saving");
        return relative_saving(energy, energy_base);
    }

    double edp(double energy, double time)
    {
        if (!(energy >= 0.0) || !(time >= 0.0)) {
            throw Error(ErrorKind::parameter, "edp: energy and time must be non-negative");
        }
        return energy * time;
    }

    double edp_saving(double edp_value, double edp_base)
    {
        require_positive(edp_base, "edp_saving");
        return relative_saving(edp_value, edp_base);
    }

    double active_saving(double power, double power_base, double power_idle)
    {
        if (!(power_idle >= 0.0)) {
            throw Error(ErrorKind::parameter, "active_saving: idle power must be non-negative");
        }
        if (!(power_base > power_idle)) {
            throw Error(ErrorKind::parameter, "active_saving: no active power in baseline");
        }
        if (!(power >= power_idle)) {
            throw Error(ErrorKind::parameter, "active_saving: power below idle power");
        }
        double active_base = power_base - power_idle;
        return 100.0 * (active_base - (power - power_idle)) / active_base;
    }

    RunMetrics RunMetrics::from_primaries(double exec_time, double pkg_energy, double gpu_energy)
    {
        RunMetrics m;
        m.exec_time = exec_time;
        m.pkg_energy = pkg_energy;
        m.gpu_energy = gpu_energy;
        m.total_energy = pkg_energy + gpu_energy;
        m.mean_pkg_power = exec_time > 0.0 ? pkg_energy / exec_time : 0.0;
        m.edp = m.total_energy * exec_time;
        return m;
    }

    RunMetrics summarize(const SimResult &result)
    {
        return RunMetrics::from_primaries(result.exec_time, result.pkg_energy, result.gpu_energy);
    }

    namespace
    {
        double trimmed(std::vector<double> values)
        {
            if (std::all_of(values.begin(), values.end(),
                            [&values](double v) { return v == values.front(); })) {
                return values.front();
            }
            std::sort(values.begin(), values.end());
            auto first = values.begin();
            auto last = values.end();
            if (values.size() >= 3) {
                ++first;
                --last;
            }
            double sum = 0.0;
            for (auto it = first; it != last; ++it) {
                sum += *it;
            }
            return sum / static_cast<double>(last - first);
        }
    }

    RunMetrics trimmed_mean(const std::vector<RunMetrics> &runs)
    {
        if (runs.empty()) {
            throw Error(ErrorKind::parameter, "trimmed_mean: no runs");
        }
        std::vector<double> time, pkg, gpu;
        for (const auto &run : runs) {
            time.push_back(run.exec_time);
            pkg.push_back(run.pkg_energy);
            gpu.push_back(run.gpu_energy);
        }
        return RunMetrics::from_primaries(trimmed(time), trimmed(pkg), trimmed(gpu));
    }

    ComparisonReport compare(const std::string &governor, const RunMetrics &run,
                             const std::string &baseline, const RunMetrics &base,
                             std::optional<double> idle_power)
    {
        ComparisonReport rep;
        rep.governor = governor;
        rep.baseline = baseline;
        rep.perf_loss_pct = perf_loss(run.exec_time, base.exec_time);
        rep.pkg_power_saving_pct = power_saving(run.mean_pkg_power, base.mean_pkg_power);
        rep.energy_saving_pct = energy_saving(run.total_energy, base.total_energy);
        rep.edp_saving_pct = edp_saving(run.edp, base.edp);
        if (idle_power) {
            double power = run.total_energy / run.exec_time;
            double power_base = base.total_energy / base.exec_time;
            rep.active_power_saving_pct = active_saving(power, power_base, *idle_power);
            double active_energy = run.total_energy - *idle_power * run.exec_time;
            double active_energy_base = base.total_energy - *idle_power * base.exec_time;
            if (!(active_energy_base > 0.0)) {
                throw Error(ErrorKind::parameter, "compare: no active energy in baseline");
            }
            rep.active_energy_saving_pct = relative_saving(active_energy, active_energy_base);
        }
        return rep;
    }

    nlohmann::ordered_json to_json(const ComparisonReport &report)
    {
        nlohmann::ordered_json out;
        out["governor"] = report.governor;
        out["baseline"] = report.baseline;
        out["perf_loss_pct"] = report.perf_loss_pct;
        out["pkg_power_saving_pct"] = report.pkg_power_saving_pct;
        out["energy_saving_pct"] = report.energy_saving_pct;
        out["edp_saving_pct"] = report.edp_saving_pct;
        if (report.active_power_saving_pct) {
            out["active_power_saving_pct"] = *report.active_power_saving_pct;
        }
        if (report.active_energy_saving_pct) {
            out["active_energy_saving_pct"] = *report.active_energy_saving_pct;
        }
        return out;
    }

    nlohmann::ordered_json to_json(const RunMetrics &metrics)
    {
        return {
            {"exec_time_s", metrics.exec_time},
            {"pkg_energy_j", metrics.pkg_energy},
            {"gpu_energy_j", metrics.gpu_energy},
            {"total_energy_j", metrics.total_energy},
            {"mean_pkg_power_w", metrics.mean_pkg_power},
            {"edp_js", metrics.edp},
        };
    }

    void write_report_csv(std::ostream &sink, const ComparisonReport &report)
    {
        auto row = [&sink](const char *metric, std::optional<double> value) {
            sink << metric << ',';
            if (value) {
                sink << format_double(*value);
            }
            sink << '\n';
        };
        sink << "metric,value_pct\n";
        row("perf_loss", report.perf_loss_pct);
        row("pkg_power_saving", report.pkg_power_saving_pct);
        row("energy_saving", report.energy_saving_pct);
        row("edp_saving", report.edp_saving_pct);
        row("active_power_saving", report.active_power_saving_pct);
        row("active_energy_saving", report.active_energy_saving_pct);
    }
}

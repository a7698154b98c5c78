/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ufs/simsys.hpp"

#include <algorithm>
#include <cmath>

#include "ufs/error.hpp"

namespace ufs
{
    std::string_view to_string(BandwidthShape shape)
    {
        return shape == BandwidthShape::linear ? "linear" : "saturating";
    }

    std::optional<BandwidthShape> bandwidth_shape_from_string(std::string_view text)
    {
        if (text == "linear") {
            return BandwidthShape::linear;
        }
        if (text == "saturating") {
            return BandwidthShape::saturating;
        }
        return std::nullopt;
    }

    void BandwidthModel::validate(void) const
    {
        if (!(bw_max > 0.0) || !std::isfinite(bw_max)) {
            throw Error(ErrorKind::parameter, "bandwidth model: bw_max must be positive");
        }
        if (shape == BandwidthShape::saturating && !(knee > 0.0 && knee <= 1.0)) {
            throw Error(ErrorKind::parameter, "bandwidth model: knee must be in (0, 1]");
        }
    }

    void PowerModel::validate(void) const
    {
        const double values[] = {p_uncore_min, p_uncore_max, p_core_active, p_pkg_idle,
                                 p_gpu_active, p_gpu_idle};
        for (double value : values) {
            if (!(value >= 0.0) || !std::isfinite(value)) {
                throw Error(ErrorKind::parameter, "power model: powers must be finite and non-negative");
            }
        }
        if (!(p_uncore_max >= p_uncore_min)) {
            throw Error(ErrorKind::parameter, "power model: p_uncore_max must be >= p_uncore_min");
        }
        if (!(exponent >= 1.0) || !std::isfinite(exponent)) {
            throw Error(ErrorKind::parameter, "power model: exponent must be >= 1");
        }
    }

    void SimModels::validate(void) const
    {
        if (!(range.f_min > 0.0) || !(range.f_min < range.f_max) || !std::isfinite(range.f_max)) {
            throw Error(ErrorKind::parameter, "models: frequency range requires 0 < f_min < f_max");
        }
        bandwidth.validate();
        power.validate();
        if (!(dram_watts_per_gbps >= 0.0) || !(ipc_nominal >= 0.0)) {
            throw Error(ErrorKind::parameter, "models: dram_watts_per_gbps and ipc_nominal must be non-negative");
        }
    }

    namespace
    {
        void check_freq(double freq, double f_min, double f_max)
        {
            if (!(freq >= f_min && freq <= f_max)) {
                throw Error(ErrorKind::range, "frequency " + format_double(freq) + " Hz outside [" +
                            format_double(f_min) + ", " + format_double(f_max) + "]");
            }
        }
    }

    double bandwidth_at(double freq, const BandwidthModel &model, double f_min, double f_max)
    {
        check_freq(freq, f_min, f_max);
        if (freq == f_max) {
            return model.bw_max;
        }
        double ratio = freq / f_max;
        if (model.shape == BandwidthShape::saturating) {
            return model.bw_max * std::min(1.0, ratio / model.knee);
        }
        return model.bw_max * ratio;
    }

    double uncore_power_at(double freq, const PowerModel &model, double f_min, double f_max)
    {
        check_freq(freq, f_min, f_max);
        double frac = (freq - f_min) / (f_max - f_min);
        return model.p_uncore_min + (model.p_uncore_max - model.p_uncore_min) * std::pow(frac, model.exponent);
    }

    bool SimResult::operator==(const SimResult &other) const
    {
        auto same_tick = [](const TickRecord &a, const TickRecord &b) {
            return a.t == b.t && a.dt == b.dt && a.freq == b.freq && a.achieved == b.achieved &&
                   a.demand == b.demand && a.pkg_power == b.pkg_power && a.gpu_power == b.gpu_power &&
                   a.dram_power == b.dram_power && a.ipc == b.ipc;
        };
        auto same_cmd = [](const CommandRecord &a, const CommandRecord &b) {
            return a.t == b.t && a.command == b.command;
        };
        return governor == other.governor && exec_time == other.exec_time &&
               pkg_energy == other.pkg_energy && gpu_energy == other.gpu_energy &&
               total_energy == other.total_energy && dram_energy == other.dram_energy &&
               mean_pkg_power == other.mean_pkg_power && edp == other.edp &&
               entries_completed == other.entries_completed && work_completed == other.work_completed &&
               std::equal(ticks.begin(), ticks.end(), other.ticks.begin(), other.ticks.end(), same_tick) &&
               std::equal(command_log.begin(), command_log.end(),
                          other.command_log.begin(), other.command_log.end(), same_cmd);
    }

    EntryAdvance advance_entry(const TraceEntry &entry, double remaining, double freq,
                               const SimModels &models, double period, double budget)
    {
        double bw = bandwidth_at(freq, models.bandwidth, models.range.f_min, models.range.f_max);
        EntryAdvance adv{};
        adv.achieved = std::min(entry.demand, bw);
        double ratio = entry.demand > 0.0 ? adv.achieved / entry.demand : 1.0;
        adv.rate = ratio >= 1.0 ? 1.0 : entry.compute_weight + (1.0 - entry.compute_weight) * ratio;
        if (!(adv.rate > 0.0)) {
            adv.progress = 0.0;
            adv.elapsed = budget;
            return adv;
        }
        double need = remaining * period / adv.rate;
        if (need <= budget) {
            adv.progress = remaining;
            adv.elapsed = need;
        }
        else {
            adv.progress = std::min(remaining, budget * adv.rate / period);
            adv.elapsed = budget;
        }
        return adv;
    }

    Simulator::Simulator(const WorkloadTrace &trace, Governor &governor, const SimModels &models)
        : m_trace(trace)
        , m_governor(governor)
        , m_models(models)
        , m_freq(governor.initial_frequency())
    {
        trace.validate();
        models.validate();
        check_freq(m_freq, models.range.f_min, models.range.f_max);
        m_max_ticks = models.max_ticks != 0 ? models.max_ticks
                                            : 1000 * static_cast<std::uint64_t>(trace.entries.size()) + 1000;
        m_result.governor = governor.name();
    }

    std::optional<FrequencyCommand> Simulator::step(void)
    {
        if (done()) {
            return std::nullopt;
        }
        if (m_tick >= m_max_ticks) {
            throw Error(ErrorKind::divergence, "simulation of '" + m_trace.name + "' under " +
                        m_governor.name() + " did not finish within " + std::to_string(m_max_ticks) +
                        " ticks");
        }
        const double period = m_trace.period;
        const double t0 = static_cast<double>(m_tick) * period;
        double budget = period;
        double achieved_time = 0.0;
        double demand_time = 0.0;
        double rate_time = 0.0;
        while (budget > 0.0 && !done()) {
            const auto &entry = m_trace.entries[m_entry];
            auto adv = advance_entry(entry, m_remaining, m_freq, m_models, period, budget);
            achieved_time += adv.achieved * adv.elapsed;
            demand_time += entry.demand * adv.elapsed;
            rate_time += adv.rate * adv.elapsed;
            m_result.work_completed += adv.progress;
            if (adv.progress >= m_remaining) {
                ++m_entry;
                ++m_result.entries_completed;
                m_remaining = 1.0;
            }
            else {
                m_remaining -= adv.progress;
            }
            budget -= adv.elapsed;
        }
        const double len = done() ? period - budget : period;

        TickRecord rec{};
        rec.t = t0;
        rec.dt = len;
        rec.freq = m_freq;
        rec.demand = len > 0.0 ? demand_time / len : 0.0;
        // The exact mean never exceeds either bound; clamp away rounding.
        rec.achieved = len > 0.0 ? achieved_time / len : 0.0;
        rec.achieved = std::min({rec.achieved, rec.demand,
                                 bandwidth_at(m_freq, m_models.bandwidth, m_models.range.f_min, m_models.range.f_max)});
        rec.ipc = len > 0.0 ? m_models.ipc_nominal * rate_time / len : m_models.ipc_nominal;
        const auto &pm = m_models.power;
        rec.pkg_power = pm.p_pkg_idle + pm.p_core_active +
                        uncore_power_at(m_freq, pm, m_models.range.f_min, m_models.range.f_max);
        // work remained for the whole tick, so the GPU was busy throughout
        rec.gpu_power = pm.p_gpu_active;
        rec.dram_power = m_models.dram_watts_per_gbps * rec.achieved / 1e9;
        m_result.ticks.push_back(rec);
        m_result.pkg_energy += rec.pkg_power * len;
        m_result.gpu_energy += rec.gpu_power * len;
        m_result.dram_energy += rec.dram_power * len;
        m_result.exec_time = t0 + len;
        ++m_tick;

        if (done()) {
            return std::nullopt;
        }
        const double t1 = static_cast<double>(m_tick) * period;
        Observation obs{
            {t1, rec.achieved},
            PowerSample{t1, rec.pkg_power, rec.dram_power},
            IpcSample{t1, rec.ipc},
        };
        auto cmd = m_governor.decide(obs);
        check_freq(cmd.target, m_models.range.f_min, m_models.range.f_max);
        m_result.command_log.push_back({t1, cmd});
        m_freq = cmd.target;
        return cmd;
    }

    SimResult Simulator::finish(void)
    {
        while (!done()) {
            step();
        }
        auto &res = m_result;
        res.total_energy = res.pkg_energy + res.gpu_energy;
        res.mean_pkg_power = res.exec_time > 0.0 ? res.pkg_energy / res.exec_time : 0.0;
        res.edp = res.total_energy * res.exec_time;
        return std::move(m_result);
    }

    SimResult run(const WorkloadTrace &trace, Governor &governor, const SimModels &models)
    {
        Simulator sim(trace, governor, models);
        return sim.finish();
    }
}

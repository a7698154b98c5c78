/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ufs/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <set>

#include "ufs/error.hpp"

namespace ufs
{
    using json = nlohmann::json;

    const std::vector<std::string_view> &governor_names(void)
    {
        static const std::vector<std::string_view> names = {
            "magus", "static_min", "static_max", "tdp_default", "ups",
        };
        return names;
    }

    namespace
    {
        std::string valid_governor_list(void)
        {
            std::string out;
            for (auto name : governor_names()) {
                out += (out.empty() ? "" : ", ") + std::string(name);
            }
            return out;
        }

        bool is_governor_name(std::string_view name)
        {
            const auto &names = governor_names();
            return std::find(names.begin(), names.end(), name) != names.end();
        }

        /// Reads typed fields out of JSON objects, recording a diagnostic
        /// instead of throwing so one pass reports every problem.
        class FieldReader
        {
            public:
                explicit FieldReader(std::vector<ConfigDiagnostic> &diags)
                    : m_diags(diags)
                {

                }

                void error(const std::string &location, const std::string &message)
                {
                    m_diags.push_back({location, message});
                }

                bool is_object(const json &node, const std::string &location)
                {
                    if (!node.is_object()) {
                        error(location, "expected an object");
                        return false;
                    }
                    return true;
                }

                void allow_keys(const json &obj, const std::string &location,
                                std::initializer_list<std::string_view> allowed)
                {
                    for (const auto &item : obj.items()) {
                        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
                            error(join(location, item.key()), "unknown key");
                        }
                    }
                }

                std::optional<double> number(const json &obj, const std::string &location, const char *key)
                {
                    if (!obj.contains(key)) {
                        return std::nullopt;
                    }
                    const auto &node = obj.at(key);
                    if (!node.is_number()) {
                        error(join(location, key), "expected a number");
                        return std::nullopt;
                    }
                    return node.get<double>();
                }

                /// GB/s or GHz field converted to SI with exact decimal scaling.
                std::optional<double> giga(const json &obj, const std::string &location, const char *key)
                {
                    if (!number(obj, location, key)) {
                        return std::nullopt;
                    }
                    return parse_gbps(obj.at(key).dump());
                }

                std::optional<std::size_t> count(const json &obj, const std::string &location, const char *key)
                {
                    if (!obj.contains(key)) {
                        return std::nullopt;
                    }
                    const auto &node = obj.at(key);
                    if (!node.is_number_integer() || node.get<long long>() < 0) {
                        error(join(location, key), "expected a non-negative integer");
                        return std::nullopt;
                    }
                    return node.get<std::size_t>();
                }

                std::optional<std::string> text(const json &obj, const std::string &location, const char *key)
                {
                    if (!obj.contains(key)) {
                        return std::nullopt;
                    }
                    const auto &node = obj.at(key);
                    if (!node.is_string()) {
                        error(join(location, key), "expected a string");
                        return std::nullopt;
                    }
                    return node.get<std::string>();
                }

                static std::string join(const std::string &location, std::string_view key)
                {
                    return location.empty() ? std::string(key) : location + "." + std::string(key);
                }

            private:
                std::vector<ConfigDiagnostic> &m_diags;
        };

        std::filesystem::path resolve(const std::filesystem::path &base_dir, const std::string &path)
        {
            std::filesystem::path p(path);
            return p.is_absolute() ? p : base_dir / p;
        }

        std::optional<WorkloadTrace> parse_trace_part(FieldReader &rd, const json &node,
                                                      const std::string &loc,
                                                      const std::filesystem::path &base_dir,
                                                      double default_period)
        {
            if (!rd.is_object(node, loc)) {
                return std::nullopt;
            }
            if (node.contains("file")) {
                rd.allow_keys(node, loc, {"file", "name"});
                auto file = rd.text(node, loc, "file");
                if (!file) {
                    return std::nullopt;
                }
                try {
                    return read_trace_file(resolve(base_dir, *file));
                }
                catch (const Error &ex) {
                    rd.error(FieldReader::join(loc, "file"), ex.what());
                    return std::nullopt;
                }
            }
            auto kind = rd.text(node, loc, "generator");
            if (!kind) {
                rd.error(loc, "needs a 'file', 'generator' or 'segments' entry");
                return std::nullopt;
            }
            double period = rd.number(node, loc, "period_s").value_or(default_period);
            double weight = rd.number(node, loc, "compute_weight").value_or(0.0);
            auto need_giga = [&](const char *key) {
                auto value = rd.giga(node, loc, key);
                if (!value && !node.contains(key)) {
                    rd.error(FieldReader::join(loc, key), "required");
                }
                return value.value_or(0.0);
            };
            auto need_count = [&](const char *key) {
                auto value = rd.count(node, loc, key);
                if (!value && !node.contains(key)) {
                    rd.error(FieldReader::join(loc, key), "required");
                }
                return value.value_or(0);
            };
            std::size_t before = 0;
            try {
                if (*kind == "phase_alternating") {
                    rd.allow_keys(node, loc, {"generator", "low_gbps", "high_gbps", "phase_len", "total",
                                              "period_s", "compute_weight", "name"});
                    double low = need_giga("low_gbps");
                    double high = need_giga("high_gbps");
                    std::size_t phase_len = need_count("phase_len");
                    std::size_t total = need_count("total");
                    return synth_phase_alternating(low, high, phase_len, total, period, weight);
                }
                if (*kind == "oscillating") {
                    rd.allow_keys(node, loc, {"generator", "low_gbps", "high_gbps", "toggle_every", "total",
                                              "period_s", "compute_weight", "name"});
                    double low = need_giga("low_gbps");
                    double high = need_giga("high_gbps");
                    std::size_t toggle = need_count("toggle_every");
                    std::size_t total = need_count("total");
                    return synth_oscillating(low, high, toggle, total, period, weight);
                }
                if (*kind == "training_spikes") {
                    rd.allow_keys(node, loc, {"generator", "base_gbps", "spike_gbps", "spike_len", "cycle_len",
                                              "cycles", "period_s", "compute_weight", "name"});
                    double base = need_giga("base_gbps");
                    double spike = need_giga("spike_gbps");
                    std::size_t spike_len = need_count("spike_len");
                    std::size_t cycle_len = need_count("cycle_len");
                    std::size_t cycles = need_count("cycles");
                    return synth_training_spikes(base, spike, spike_len, cycle_len, cycles, period, weight);
                }
            }
            catch (const Error &ex) {
                (void)before;
                rd.error(loc, ex.what());
                return std::nullopt;
            }
            rd.error(FieldReader::join(loc, "generator"),
                     "unknown generator '" + *kind + "'; valid: phase_alternating, oscillating, training_spikes");
            return std::nullopt;
        }

        std::optional<WorkloadTrace> parse_trace(FieldReader &rd, const json &doc,
                                                 const std::filesystem::path &base_dir,
                                                 double default_period)
        {
            if (!doc.contains("trace")) {
                rd.error("trace", "required");
                return std::nullopt;
            }
            const auto &node = doc.at("trace");
            if (!rd.is_object(node, "trace")) {
                return std::nullopt;
            }
            std::optional<WorkloadTrace> trace;
            if (node.contains("segments")) {
                rd.allow_keys(node, "trace", {"segments", "name"});
                const auto &segs = node.at("segments");
                if (!segs.is_array() || segs.empty()) {
                    rd.error("trace.segments", "expected a non-empty array");
                    return std::nullopt;
                }
                std::vector<WorkloadTrace> parts;
                bool ok = true;
                for (std::size_t idx = 0; idx < segs.size(); ++idx) {
                    auto part = parse_trace_part(rd, segs[idx], "trace.segments[" + std::to_string(idx) + "]",
                                                 base_dir, default_period);
                    ok = ok && part.has_value();
                    if (part) {
                        parts.push_back(std::move(*part));
                    }
                }
                if (!ok) {
                    return std::nullopt;
                }
                try {
                    trace = concat_traces("segments", parts);
                }
                catch (const Error &ex) {
                    rd.error("trace.segments", ex.what());
                    return std::nullopt;
                }
            }
            else {
                trace = parse_trace_part(rd, node, "trace", base_dir, default_period);
            }
            if (trace) {
                if (auto name = rd.text(node, "trace", "name")) {
                    trace->name = *name;
                }
            }
            return trace;
        }

        void parse_models(FieldReader &rd, const json &doc, SimModels &models)
        {
            if (!doc.contains("models")) {
                return;
            }
            const auto &node = doc.at("models");
            if (!rd.is_object(node, "models")) {
                return;
            }
            rd.allow_keys(node, "models", {"bandwidth", "power", "dram_w_per_gbps", "ipc_nominal", "max_ticks"});
            if (node.contains("bandwidth") && rd.is_object(node.at("bandwidth"), "models.bandwidth")) {
                const auto &bw = node.at("bandwidth");
                const std::string loc = "models.bandwidth";
                rd.allow_keys(bw, loc, {"bw_max_gbps", "shape", "knee"});
                models.bandwidth.bw_max = rd.giga(bw, loc, "bw_max_gbps").value_or(models.bandwidth.bw_max);
                models.bandwidth.knee = rd.number(bw, loc, "knee").value_or(models.bandwidth.knee);
                if (auto shape = rd.text(bw, loc, "shape")) {
                    if (auto parsed = bandwidth_shape_from_string(*shape)) {
                        models.bandwidth.shape = *parsed;
                    }
                    else {
                        rd.error(loc + ".shape", "unknown shape '" + *shape + "'; valid: linear, saturating");
                    }
                }
                try {
                    models.bandwidth.validate();
                }
                catch (const Error &ex) {
                    rd.error(loc, ex.what());
                }
            }
            if (node.contains("power") && rd.is_object(node.at("power"), "models.power")) {
                const auto &pw = node.at("power");
                const std::string loc = "models.power";
                rd.allow_keys(pw, loc, {"p_uncore_min_w", "p_uncore_max_w", "exponent", "p_core_active_w",
                                        "p_pkg_idle_w", "p_gpu_active_w", "p_gpu_idle_w"});
                auto &pm = models.power;
                pm.p_uncore_min = rd.number(pw, loc, "p_uncore_min_w").value_or(pm.p_uncore_min);
                pm.p_uncore_max = rd.number(pw, loc, "p_uncore_max_w").value_or(pm.p_uncore_max);
                pm.exponent = rd.number(pw, loc, "exponent").value_or(pm.exponent);
                pm.p_core_active = rd.number(pw, loc, "p_core_active_w").value_or(pm.p_core_active);
                pm.p_pkg_idle = rd.number(pw, loc, "p_pkg_idle_w").value_or(pm.p_pkg_idle);
                pm.p_gpu_active = rd.number(pw, loc, "p_gpu_active_w").value_or(pm.p_gpu_active);
                pm.p_gpu_idle = rd.number(pw, loc, "p_gpu_idle_w").value_or(pm.p_gpu_idle);
                try {
                    pm.validate();
                }
                catch (const Error &ex) {
                    rd.error(loc, ex.what());
                }
            }
            models.dram_watts_per_gbps = rd.number(node, "models", "dram_w_per_gbps").value_or(models.dram_watts_per_gbps);
            models.ipc_nominal = rd.number(node, "models", "ipc_nominal").value_or(models.ipc_nominal);
            models.max_ticks = rd.count(node, "models", "max_ticks").value_or(models.max_ticks);
            if (models.dram_watts_per_gbps < 0.0 || models.ipc_nominal < 0.0) {
                rd.error("models", "dram_w_per_gbps and ipc_nominal must be non-negative");
            }
        }

        void parse_governor_section(FieldReader &rd, const json &doc, const std::filesystem::path &base_dir,
                                    GovernorConfig &config)
        {
            if (auto file = rd.text(doc, "", "governor_config_file")) {
                try {
                    config = read_governor_config_file(resolve(base_dir, *file));
                }
                catch (const Error &ex) {
                    rd.error("governor_config_file", ex.what());
                }
            }
            if (doc.contains("governor_config") && rd.is_object(doc.at("governor_config"), "governor_config")) {
                for (const auto &item : doc.at("governor_config").items()) {
                    const std::string loc = "governor_config." + item.key();
                    const auto &value = item.value();
                    if (!value.is_number() && !value.is_string()) {
                        rd.error(loc, "expected a number");
                        continue;
                    }
                    try {
                        apply_governor_setting(config, item.key(),
                                               value.is_string() ? value.get<std::string>() : value.dump());
                    }
                    catch (const Error &ex) {
                        rd.error(loc, ex.what());
                    }
                }
            }
            for (const auto &diag : config.diagnostics()) {
                rd.error("governor_config." + diag.location, diag.message);
            }
        }

        Scenario parse_impl(const json &doc, const std::filesystem::path &base_dir,
                            std::vector<ConfigDiagnostic> &diags)
        {
            FieldReader rd(diags);
            Scenario sc;
            if (!rd.is_object(doc, "")) {
                return sc;
            }
            rd.allow_keys(doc, "", {"name", "description", "trace", "models", "governor_config",
                                    "governor_config_file", "tdp_default", "ups", "governors", "baseline",
                                    "idle_power_w", "repeats", "output_dir"});
            sc.name = rd.text(doc, "", "name").value_or("scenario");
            (void)rd.text(doc, "", "description");

            parse_governor_section(rd, doc, base_dir, sc.governor_config);
            sc.models.range = {sc.governor_config.f_min, sc.governor_config.f_max};
            parse_models(rd, doc, sc.models);

            if (auto trace = parse_trace(rd, doc, base_dir, sc.governor_config.sample_period)) {
                sc.trace = std::move(*trace);
                if (sc.trace.period != sc.governor_config.sample_period) {
                    rd.error("trace.period_s", "trace period " + format_double(sc.trace.period) +
                             " s differs from governor_config.sample_period_s " +
                             format_double(sc.governor_config.sample_period) + " s");
                }
            }

            if (doc.contains("tdp_default") && rd.is_object(doc.at("tdp_default"), "tdp_default")) {
                const auto &node = doc.at("tdp_default");
                rd.allow_keys(node, "tdp_default", {"tdp_w", "margin"});
                sc.tdp.tdp = rd.number(node, "tdp_default", "tdp_w").value_or(sc.tdp.tdp);
                sc.tdp.margin = rd.number(node, "tdp_default", "margin").value_or(sc.tdp.margin);
            }
            if (doc.contains("ups") && rd.is_object(doc.at("ups"), "ups")) {
                const auto &node = doc.at("ups");
                rd.allow_keys(node, "ups", {"step_ghz", "ipc_tolerance", "dram_delta_threshold"});
                sc.ups.step = rd.giga(node, "ups", "step_ghz").value_or(sc.ups.step);
                sc.ups.ipc_tolerance = rd.number(node, "ups", "ipc_tolerance").value_or(sc.ups.ipc_tolerance);
                sc.ups.dram_delta_threshold =
                    rd.number(node, "ups", "dram_delta_threshold").value_or(sc.ups.dram_delta_threshold);
            }

            sc.governors = {"static_max", "magus"};
            if (doc.contains("governors")) {
                const auto &node = doc.at("governors");
                if (!node.is_array() || node.empty()) {
                    rd.error("governors", "expected a non-empty array of governor names");
                }
                else {
                    sc.governors.clear();
                    std::set<std::string> seen;
                    for (std::size_t idx = 0; idx < node.size(); ++idx) {
                        const std::string loc = "governors[" + std::to_string(idx) + "]";
                        if (!node[idx].is_string()) {
                            rd.error(loc, "expected a governor name");
                            continue;
                        }
                        auto name = node[idx].get<std::string>();
                        if (!is_governor_name(name)) {
                            rd.error(loc, "unknown governor '" + name + "'; valid: " + valid_governor_list());
                        }
                        else if (!seen.insert(name).second) {
                            rd.error(loc, "governor '" + name + "' listed twice");
                        }
                        sc.governors.push_back(name);
                    }
                }
            }
            sc.baseline = rd.text(doc, "", "baseline").value_or("static_max");
            if (!is_governor_name(sc.baseline)) {
                rd.error("baseline", "unknown governor '" + sc.baseline + "'; valid: " + valid_governor_list());
            }
            if (doc.contains("idle_power_w")) {
                const auto &node = doc.at("idle_power_w");
                if (node.is_string() && node.get<std::string>() == "model") {
                    sc.idle_power = sc.models.power.idle_power();
                }
                else if (node.is_number() && node.get<double>() >= 0.0) {
                    sc.idle_power = node.get<double>();
                }
                else {
                    rd.error("idle_power_w", "expected a non-negative number or \"model\"");
                }
            }
            sc.repeats = rd.count(doc, "", "repeats").value_or(1);
            if (sc.repeats < 1) {
                rd.error("repeats", "must be at least 1");
            }
            if (auto out = rd.text(doc, "", "output_dir")) {
                sc.output_dir = *out;
            }

            // Constructing each governor runs its own parameter checks.
            if (diags.empty()) {
                for (auto name : governor_names()) {
                    try {
                        (void)make_governor(name, sc);
                    }
                    catch (const Error &ex) {
                        rd.error(name == "ups" ? "ups" : name == "tdp_default" ? "tdp_default" : std::string(name),
                                 ex.what());
                    }
                }
            }
            return sc;
        }

        std::string join_diagnostics(const std::vector<ConfigDiagnostic> &diags)
        {
            std::string msg;
            for (const auto &diag : diags) {
                msg += "\n  " + diag.location + ": " + diag.message;
            }
            return msg;
        }
    }

    std::vector<ConfigDiagnostic> check_scenario(const nlohmann::json &doc, const std::filesystem::path &base_dir)
    {
        std::vector<ConfigDiagnostic> diags;
        (void)parse_impl(doc, base_dir, diags);
        return diags;
    }

    Scenario parse_scenario(const nlohmann::json &doc, const std::filesystem::path &base_dir)
    {
        std::vector<ConfigDiagnostic> diags;
        Scenario sc = parse_impl(doc, base_dir, diags);
        if (!diags.empty()) {
            throw Error(ErrorKind::config, "invalid scenario:" + join_diagnostics(diags));
        }
        return sc;
    }

    namespace
    {
        json read_json_file(const std::filesystem::path &path)
        {
            std::ifstream in(path);
            if (!in) {
                throw Error(ErrorKind::config, "cannot open " + path.string());
            }
            try {
                return json::parse(in);
            }
            catch (const json::parse_error &ex) {
                throw Error(ErrorKind::config, path.string() + ": " + ex.what());
            }
        }
    }

    Scenario load_scenario(const std::filesystem::path &path)
    {
        json doc = read_json_file(path);
        try {
            return parse_scenario(doc, path.parent_path());
        }
        catch (const Error &ex) {
            throw Error(ErrorKind::config, path.string() + ": " + ex.what());
        }
    }

    std::vector<ConfigDiagnostic> validate_config_file(const std::filesystem::path &path)
    {
        if (!std::filesystem::exists(path)) {
            return {{path.string(), "file not found"}};
        }
        if (path.extension() == ".json") {
            try {
                return check_scenario(read_json_file(path), path.parent_path());
            }
            catch (const Error &ex) {
                return {{path.string(), ex.what()}};
            }
        }
        try {
            return read_governor_config_file(path).diagnostics();
        }
        catch (const ParseError &ex) {
            return {{path.string() + ":" + std::to_string(ex.line()), ex.detail()}};
        }
        catch (const Error &ex) {
            return {{path.string(), ex.what()}};
        }
    }

    std::unique_ptr<Governor> make_governor(std::string_view name, const Scenario &scenario)
    {
        const FrequencyRange range{scenario.governor_config.f_min, scenario.governor_config.f_max};
        if (name == "magus") {
            return std::make_unique<MagusGovernor>(scenario.governor_config);
        }
        if (name == "static_min") {
            return std::make_unique<StaticGovernor>(range.f_min, range);
        }
        if (name == "static_max") {
            return std::make_unique<StaticGovernor>(range.f_max, range);
        }
        if (name == "tdp_default") {
            return std::make_unique<TdpDefaultGovernor>(scenario.tdp.tdp, scenario.tdp.margin, range);
        }
        if (name == "ups") {
            UpsState st;
            st.range = range;
            st.current_freq = range.f_max;
            st.step = scenario.ups.step;
            st.ipc_tolerance = scenario.ups.ipc_tolerance;
            st.dram_delta_threshold = scenario.ups.dram_delta_threshold;
            return std::make_unique<UpsGovernor>(st);
        }
        throw Error(ErrorKind::config, "unknown governor '" + std::string(name) + "'; valid: " +
                    valid_governor_list());
    }

    void ExperimentPlan::validate(void) const
    {
        if (governors.empty()) {
            throw Error(ErrorKind::config, "experiment plan lists no governors");
        }
        if (baseline >= governors.size()) {
            throw Error(ErrorKind::config, "experiment plan baseline index out of range");
        }
        if (repeats < 1) {
            throw Error(ErrorKind::config, "experiment plan needs at least one repeat");
        }
        std::set<std::string> seen;
        for (const auto &name : governors) {
            if (!is_governor_name(name)) {
                throw Error(ErrorKind::config, "unknown governor '" + name + "'; valid: " + valid_governor_list());
            }
            if (!seen.insert(name).second) {
                throw Error(ErrorKind::config, "governor '" + name + "' listed twice");
            }
        }
    }

    ExperimentPlan plan_from_scenario(Scenario scenario)
    {
        ExperimentPlan plan;
        plan.governors = scenario.governors;
        auto it = std::find(plan.governors.begin(), plan.governors.end(), scenario.baseline);
        if (it == plan.governors.end()) {
            plan.governors.insert(plan.governors.begin(), scenario.baseline);
            it = plan.governors.begin();
        }
        plan.baseline = static_cast<std::size_t>(it - plan.governors.begin());
        plan.repeats = scenario.repeats;
        plan.output_dir = scenario.output_dir;
        plan.scenario = std::move(scenario);
        return plan;
    }

    ExperimentOutcome run_experiment(const ExperimentPlan &plan)
    {
        plan.validate();
        const auto &sc = plan.scenario;
        std::vector<std::future<std::vector<SimResult>>> pending;
        for (const auto &name : plan.governors) {
            pending.push_back(std::async(std::launch::async, [&sc, &plan, name]() {
                std::vector<SimResult> repeats;
                for (std::size_t rep = 0; rep < plan.repeats; ++rep) {
                    auto governor = make_governor(name, sc);
                    repeats.push_back(run(sc.trace, *governor, sc.models));
                }
                return repeats;
            }));
        }

        ExperimentOutcome out;
        for (auto &fut : pending) {
            auto repeats = fut.get();
            std::vector<RunMetrics> summaries;
            for (const auto &res : repeats) {
                summaries.push_back(summarize(res));
            }
            out.metrics.push_back(trimmed_mean(summaries));
            out.runs.push_back(std::move(repeats.front()));
        }
        const auto &base_name = plan.governors[plan.baseline];
        for (std::size_t idx = 0; idx < plan.governors.size(); ++idx) {
            out.reports.push_back(compare(plan.governors[idx], out.metrics[idx],
                                          base_name, out.metrics[plan.baseline], sc.idle_power));
        }

        auto &rep = out.report;
        rep["scenario"] = sc.name;
        rep["trace"] = sc.trace.name;
        rep["baseline"] = base_name;
        rep["repeats"] = plan.repeats;
        rep["runs"] = nlohmann::ordered_json::array();
        rep["comparisons"] = nlohmann::ordered_json::array();
        for (std::size_t idx = 0; idx < plan.governors.size(); ++idx) {
            nlohmann::ordered_json run_json;
            run_json["governor"] = plan.governors[idx];
            run_json.update(to_json(out.metrics[idx]));
            rep["runs"].push_back(run_json);
            rep["comparisons"].push_back(to_json(out.reports[idx]));
        }

        if (!plan.output_dir.empty()) {
            std::filesystem::create_directories(plan.output_dir);
            std::ofstream(plan.output_dir / "report.json") << rep.dump(2) << '\n';
            for (std::size_t idx = 0; idx < plan.governors.size(); ++idx) {
                std::ofstream csv(plan.output_dir / ("metrics_" + plan.governors[idx] + ".csv"));
                write_report_csv(csv, out.reports[idx]);
                write_commands_csv(plan.output_dir / ("commands_" + plan.governors[idx] + ".csv"), out.runs[idx]);
            }
            emit_timeline(plan.output_dir, out.runs, sc.trace.period);
        }
        return out;
    }

    void write_commands_csv(const std::filesystem::path &path, const SimResult &run)
    {
        std::ofstream out(path);
        if (!out) {
            throw Error(ErrorKind::source, "cannot write " + path.string());
        }
        out << "t,freq_ghz,cause\n";
        for (const auto &rec : run.command_log) {
            out << format_double(rec.t) << ',' << format_gbps(rec.command.target) << ','
                << to_string(rec.command.cause) << '\n';
        }
    }

    void emit_timeline(const std::filesystem::path &dir, const std::vector<SimResult> &runs, double period)
    {
        std::size_t rows = 0;
        for (const auto &run : runs) {
            rows = std::max(rows, run.ticks.size());
        }
        auto open = [&dir](const std::string &name) {
            std::ofstream out(dir / name);
            if (!out) {
                throw Error(ErrorKind::source, "cannot write " + (dir / name).string());
            }
            return out;
        };
        auto grid_time = [period](std::size_t row) {
            return format_double(static_cast<double>(row) * period);
        };

        for (const auto &run : runs) {
            auto out = open("timeline_" + run.governor + ".csv");
            out << "t,dt,freq_ghz,achieved_gbps,demand_gbps,pkg_w,gpu_w\n";
            for (std::size_t row = 0; row < rows; ++row) {
                out << grid_time(row);
                if (row < run.ticks.size()) {
                    const auto &tick = run.ticks[row];
                    out << ',' << format_double(tick.dt) << ',' << format_gbps(tick.freq) << ','
                        << format_gbps(tick.achieved) << ',' << format_gbps(tick.demand) << ','
                        << format_double(tick.pkg_power) << ',' << format_double(tick.gpu_power);
                }
                else {
                    out << ",,,,,,";
                }
                out << '\n';
            }
        }

        auto combined = [&](const std::string &name, auto field) {
            auto out = open(name);
            out << 't';
            for (const auto &run : runs) {
                out << ',' << run.governor;
            }
            out << '\n';
            for (std::size_t row = 0; row < rows; ++row) {
                out << grid_time(row);
                for (const auto &run : runs) {
                    out << ',';
                    if (row < run.ticks.size()) {
                        out << format_gbps(field(run.ticks[row]));
                    }
                }
                out << '\n';
            }
        };
        combined("throughput.csv", [](const TickRecord &tick) { return tick.achieved; });
        combined("frequency.csv", [](const TickRecord &tick) { return tick.freq; });
    }
}

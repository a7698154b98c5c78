/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ufs/hwadapter.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ufs/error.hpp"

namespace ufs
{
    namespace
    {
        constexpr const char *M_DEFAULT_BASE = "/sys/devices/system/cpu/intel_uncore_frequency";

        std::uint64_t read_decimal(const std::filesystem::path &path)
        {
            std::ifstream in(path);
            std::string text;
            if (!in || !std::getline(in, text)) {
                throw Error(ErrorKind::source, "cannot read " + path.string());
            }
            while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) {
                text.pop_back();
            }
            std::uint64_t value = 0;
            auto res = std::from_chars(text.data(), text.data() + text.size(), value);
            if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
                throw Error(ErrorKind::source, path.string() + ": not a decimal count: '" + text + "'");
            }
            return value;
        }

        void write_khz(const std::filesystem::path &path, std::uint64_t khz)
        {
            const std::string text = std::to_string(khz) + "\n";
            int fd = ::open(path.c_str(), O_WRONLY | O_TRUNC);
            if (fd < 0) {
                int err = errno;
                if (err == EACCES || err == EPERM || err == EROFS) {
                    throw Error(ErrorKind::actuation, "permission denied writing " + path.string() +
                                ": run as root or grant this user write access to the uncore "
                                "frequency files (chown/chmod or a udev rule)");
                }
                throw Error(ErrorKind::actuation, "cannot open " + path.string() + ": " + std::strerror(err));
            }
            ssize_t written = ::write(fd, text.data(), text.size());
            int err = errno;
            ::close(fd);
            if (written != static_cast<ssize_t>(text.size())) {
                if (written < 0 && err == EINVAL) {
                    throw Error(ErrorKind::hardware_reject, "kernel rejected " + std::to_string(khz) +
                                " kHz for " + path.string());
                }
                throw Error(ErrorKind::actuation, "write to " + path.string() + " failed: " +
                            (written < 0 ? std::strerror(err) : "short write"));
            }
        }
    }

    std::uint64_t hz_to_khz(double hz)
    {
        if (!(hz >= 0.0) || !std::isfinite(hz)) {
            throw Error(ErrorKind::range, "frequency must be finite and non-negative");
        }
        return static_cast<std::uint64_t>(std::llround(hz / 1000.0));
    }

    UncoreDomain::UncoreDomain(std::filesystem::path dir)
        : m_dir(std::move(dir))
    {
        for (const char *name : {"min_freq_khz", "max_freq_khz"}) {
            if (!std::filesystem::exists(m_dir / name)) {
                throw Error(ErrorKind::source, (m_dir / name).string() + " does not exist");
            }
        }
    }

    std::filesystem::path UncoreDomain::default_base(void)
    {
        const char *env = std::getenv("UFS_SYSFS_BASE");
        if (env != nullptr && *env != '\0') {
            return env;
        }
        return M_DEFAULT_BASE;
    }

    std::vector<UncoreDomain> UncoreDomain::discover(const std::filesystem::path &base)
    {
        std::error_code ec;
        std::vector<std::filesystem::path> dirs;
        for (const auto &entry : std::filesystem::directory_iterator(base, ec)) {
            auto name = entry.path().filename().string();
            if (entry.is_directory() && name.rfind("package_", 0) == 0 &&
                name.find("_die_") != std::string::npos) {
                dirs.push_back(entry.path());
            }
        }
        if (ec) {
            throw Error(ErrorKind::source, "cannot list " + base.string() + ": " + ec.message());
        }
        std::sort(dirs.begin(), dirs.end());
        std::vector<UncoreDomain> result;
        for (auto &dir : dirs) {
            result.emplace_back(std::move(dir));
        }
        return result;
    }

    std::uint64_t UncoreDomain::read_min_khz(void) const
    {
        return read_decimal(m_dir / "min_freq_khz");
    }

    std::uint64_t UncoreDomain::read_max_khz(void) const
    {
        return read_decimal(m_dir / "max_freq_khz");
    }

    std::optional<std::pair<std::uint64_t, std::uint64_t>> UncoreDomain::hardware_limits_khz(void) const
    {
        auto lo = m_dir / "initial_min_freq_khz";
        auto hi = m_dir / "initial_max_freq_khz";
        if (!std::filesystem::exists(lo) || !std::filesystem::exists(hi)) {
            return std::nullopt;
        }
        return std::make_pair(read_decimal(lo), read_decimal(hi));
    }

    bool UncoreDomain::writable(void) const
    {
        // Checked against the effective ids, which is what open() uses.
        return ::faccessat(AT_FDCWD, (m_dir / "min_freq_khz").c_str(), W_OK, AT_EACCESS) == 0 &&
               ::faccessat(AT_FDCWD, (m_dir / "max_freq_khz").c_str(), W_OK, AT_EACCESS) == 0;
    }

    PinConfirmation UncoreDomain::apply(const FrequencyCommand &cmd) const
    {
        const std::uint64_t khz = hz_to_khz(cmd.target);
        if (auto limits = hardware_limits_khz()) {
            if (khz < limits->first || khz > limits->second) {
                throw Error(ErrorKind::hardware_reject, std::to_string(khz) + " kHz outside the range [" +
                            std::to_string(limits->first) + ", " + std::to_string(limits->second) +
                            "] advertised by " + m_dir.string());
            }
        }
        // The kernel refuses min > max at any point, so order the writes.
        if (khz >= read_max_khz()) {
            write_khz(m_dir / "max_freq_khz", khz);
            write_khz(m_dir / "min_freq_khz", khz);
        }
        else {
            write_khz(m_dir / "min_freq_khz", khz);
            write_khz(m_dir / "max_freq_khz", khz);
        }
        PinConfirmation confirm{read_min_khz(), read_max_khz()};
        if (confirm.min_khz != khz || confirm.max_khz != khz) {
            throw Error(ErrorKind::hardware_reject, m_dir.string() + " reads back [" +
                        std::to_string(confirm.min_khz) + ", " + std::to_string(confirm.max_khz) +
                        "] kHz after pinning to " + std::to_string(khz) + " kHz");
        }
        return confirm;
    }

    CounterFile::CounterFile(std::filesystem::path path)
        : m_path(std::move(path))
    {

    }

    std::uint64_t CounterFile::read(void) const
    {
        return read_decimal(m_path);
    }

    ThroughputSample throughput_between(const CounterReading &prev, const CounterReading &now)
    {
        if (now.count < prev.count) {
            throw Error(ErrorKind::counter_reset, "byte counter went backwards (" +
                        std::to_string(prev.count) + " -> " + std::to_string(now.count) + ")");
        }
        if (!(now.timestamp > prev.timestamp)) {
            throw Error(ErrorKind::ordering, "counter readings are not in time order");
        }
        double bytes = static_cast<double>(now.count - prev.count);
        return {now.timestamp, bytes / (now.timestamp - prev.timestamp)};
    }

    ThroughputReader::ThroughputReader(CounterFile counter)
        : m_counter(std::move(counter))
    {

    }

    std::optional<ThroughputSample> ThroughputReader::sample(double now)
    {
        CounterReading reading{m_counter.read(), now};
        if (!m_prev) {
            m_prev = reading;
            return std::nullopt;
        }
        CounterReading prev = *m_prev;
        m_prev = reading;
        return throughput_between(prev, reading);
    }

    HardwareController::HardwareController(UncoreDomain domain, ThroughputReader reader,
                                           std::unique_ptr<Governor> governor)
        : m_domain(std::move(domain))
        , m_reader(std::move(reader))
        , m_governor(std::move(governor))
    {
        if (!m_governor) {
            throw Error(ErrorKind::parameter, "HardwareController: no governor");
        }
    }

    void HardwareController::start(double now)
    {
        m_start = now;
        double initial = m_governor->initial_frequency();
        m_domain.apply({initial, CommandCause::fixed});
        m_applied = initial;
        ++m_stats.actuations;
        m_reader.sample(0.0);
    }

    std::optional<FrequencyCommand> HardwareController::round(double now)
    {
        std::optional<ThroughputSample> sample;
        try {
            sample = m_reader.sample(now - m_start);
        }
        catch (const Error &ex) {
            if (ex.kind() != ErrorKind::counter_reset) {
                throw;
            }
            ++m_stats.discarded;
            return std::nullopt;
        }
        if (!sample) {
            return std::nullopt;
        }
        ++m_stats.rounds;
        auto cmd = m_governor->decide(Observation{*sample, std::nullopt, std::nullopt});
        if (cmd.target != m_applied) {
            m_domain.apply(cmd);
            m_applied = cmd.target;
            ++m_stats.actuations;
        }
        return cmd;
    }
}

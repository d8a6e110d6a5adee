// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/store.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <regex>
#include <tuple>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fmt/format.h>

#include "pulsecal/error.hpp"

namespace pulsecal {

namespace {

nlohmann::json calibration_to_json(const PlatformCalibration &c)
{
    return {
        {"c_p_ns", c.c_p_ns},
        {"trial_medians_ns", c.trial_medians_ns},
        {"median_range_ns", {c.median_range_ns.first, c.median_range_ns.second}},
        {"std_range_ns", {c.std_range_ns.first, c.std_range_ns.second}},
        {"n_trials", c.n_trials},
        {"tolerance_ns", c.tolerance_ns},
        {"k_factor", c.k_factor},
    };
}

PlatformCalibration calibration_from_json(const nlohmann::json &j, const OperatingStateTag &tag)
{
    PlatformCalibration c;
    c.tag = tag;
    c.c_p_ns = j.at("c_p_ns").get<double>();
    c.trial_medians_ns = j.at("trial_medians_ns").get<std::vector<double>>();
    const auto mr = j.at("median_range_ns");
    c.median_range_ns = {mr.at(0).get<double>(), mr.at(1).get<double>()};
    const auto sr = j.at("std_range_ns");
    c.std_range_ns = {sr.at(0).get<double>(), sr.at(1).get<double>()};
    c.n_trials = j.at("n_trials").get<std::size_t>();
    c.tolerance_ns = j.at("tolerance_ns").get<double>();
    c.k_factor = j.at("k_factor").get<double>();
    return c;
}

class FileLock {
public:
    explicit FileLock(const std::filesystem::path &path)
    {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) {
            if (fd_ >= 0) {
                ::close(fd_);
            }
            throw Error(fmt::format("cannot lock '{}'", path.string()));
        }
    }
    ~FileLock()
    {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    FileLock(const FileLock &) = delete;
    FileLock &operator=(const FileLock &) = delete;

private:
    int fd_ = -1;
};

}  // namespace

std::string SessionEntry::key() const
{
    return tag.platform.name() + "/" + tag.session_id;
}

LookupPolicy parse_lookup_policy(std::string_view text)
{
    if (text == "latest" || text == "latest_session" || text == "latest-session") {
        return LookupPolicy::LatestSession;
    }
    if (text == "pooled" || text == "pooled_mean" || text == "pooled-mean") {
        return LookupPolicy::PooledMean;
    }
    throw ConfigError(fmt::format("unknown lookup policy '{}'", text));
}

std::string utc_now_iso8601()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool is_valid_timestamp(std::string_view text)
{
    static const std::regex re(R"(^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})Z$)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(text.begin(), text.end(), m, re)) {
        return false;
    }
    auto field = [&](int i) { return std::stoi(m[i].str()); };
    const std::chrono::year_month_day day{std::chrono::year{field(1)}, std::chrono::month(field(2)),
                                          std::chrono::day(field(3))};
    return day.ok() && field(4) < 24 && field(5) < 60 && field(6) < 61;
}

CalibrationStore CalibrationStore::load(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) {
        if (std::filesystem::exists(path)) {
            throw ParseError(path.string(), 0, "cannot open store");
        }
        return {};
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
        return from_json(doc);
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(path.string(), 0, fmt::format("invalid store document: {}", e.what()));
    }
}

void CalibrationStore::save(const std::filesystem::path &path) const
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw Error(fmt::format("cannot write '{}'", tmp.string()));
        }
        out << to_json().dump(2) << '\n';
        if (!out) {
            throw Error(fmt::format("write to '{}' failed", tmp.string()));
        }
    }
    std::filesystem::rename(tmp, path);
}

nlohmann::json CalibrationStore::to_json() const
{
    nlohmann::json sessions = nlohmann::json::array();
    for (const auto &e : entries_) {
        sessions.push_back({
            {"platform", e.tag.platform.name()},
            {"state_label", e.tag.state_label},
            {"session_id", e.tag.session_id},
            {"captured_at", e.tag.captured_at},
            {"created_at", e.created_at},
            {"source_digest", e.source_digest},
            {"calibration", calibration_to_json(e.calibration)},
        });
    }
    return {{"schema", "pulsecal-calibration-store"}, {"schema_version", kStoreSchemaVersion}, {"sessions", sessions}};
}

CalibrationStore CalibrationStore::from_json(const nlohmann::json &doc)
{
    const auto version = doc.at("schema_version").get<int>();
    if (version != kStoreSchemaVersion) {
        throw ConfigError(fmt::format("unsupported store schema_version {}", version));
    }
    CalibrationStore store;
    for (const auto &s : doc.at("sessions")) {
        SessionEntry e;
        e.tag.platform = PlatformId::parse(s.at("platform").get<std::string>());
        e.tag.state_label = s.at("state_label").get<std::string>();
        e.tag.session_id = s.at("session_id").get<std::string>();
        e.tag.captured_at = s.at("captured_at").get<std::string>();
        e.created_at = s.at("created_at").get<std::string>();
        e.source_digest = s.at("source_digest").get<std::string>();
        e.calibration = calibration_from_json(s.at("calibration"), e.tag);
        store.entries_.push_back(std::move(e));
    }
    return store;
}

std::string CalibrationStore::record_session(const SessionEntry &entry)
{
    if (entry.tag.platform.empty() || entry.tag.session_id.empty()) {
        throw ConfigError("session entry needs a platform and a session id");
    }
    if (!is_valid_timestamp(entry.created_at)) {
        throw ConfigError(fmt::format("created_at '{}' is not YYYY-MM-DDTHH:MM:SSZ", entry.created_at));
    }
    const auto key = entry.key();
    for (const auto &existing : entries_) {
        if (existing.key() != key) {
            continue;
        }
        if (existing.source_digest != entry.source_digest) {
            throw StoreConflict(fmt::format("session '{}' already recorded with digest {}, got {}", key,
                                            existing.source_digest, entry.source_digest));
        }
        if (!(existing.calibration == entry.calibration) || !(existing.tag == entry.tag)) {
            throw StoreConflict(
                fmt::format("session '{}' already recorded from the same inputs with a different calibration", key));
        }
        return key;
    }
    entries_.push_back(entry);
    return key;
}

std::vector<SessionEntry> CalibrationStore::sessions_for(const PlatformId &platform) const
{
    std::vector<SessionEntry> out;
    std::copy_if(entries_.begin(), entries_.end(), std::back_inserter(out),
                 [&](const SessionEntry &e) { return e.tag.platform == platform; });
    std::stable_sort(out.begin(), out.end(), [](const SessionEntry &a, const SessionEntry &b) {
        return std::tie(a.created_at, a.tag.session_id) < std::tie(b.created_at, b.tag.session_id);
    });
    return out;
}

DriftReport CalibrationStore::drift_report(const PlatformId &platform, double threshold_ns) const
{
    const auto sessions = sessions_for(platform);
    if (sessions.empty()) {
        throw ConfigError(fmt::format("no sessions recorded for platform '{}'", platform.name()));
    }
    DriftReport r;
    r.platform = platform.name();
    r.threshold_ns = threshold_ns;
    for (const auto &s : sessions) {
        r.session_ids.push_back(s.tag.session_id);
        r.session_constants_ns.push_back(s.calibration.c_p_ns);
    }
    const auto [lo, hi] = std::minmax_element(r.session_constants_ns.begin(), r.session_constants_ns.end());
    r.range_ns = *hi - *lo;
    r.flagged = r.range_ns > threshold_ns;
    return r;
}

PlatformCalibration CalibrationStore::lookup_constant(const PlatformId &platform, LookupPolicy policy) const
{
    const auto sessions = sessions_for(platform);
    if (sessions.empty()) {
        throw ConfigError(fmt::format("no sessions recorded for platform '{}'", platform.name()));
    }
    const auto latest = std::max_element(sessions.begin(), sessions.end(), [](const auto &a, const auto &b) {
        return std::tie(a.created_at, a.tag.session_id) < std::tie(b.created_at, b.tag.session_id);
    });
    if (policy == LookupPolicy::LatestSession) {
        return latest->calibration;
    }
    long double weighted = 0.0L;
    std::size_t total = 0;
    for (const auto &s : sessions) {
        weighted += static_cast<long double>(s.calibration.c_p_ns) * static_cast<long double>(s.calibration.n_trials);
        total += s.calibration.n_trials;
    }
    if (total == 0) {
        throw ConfigError(fmt::format("platform '{}' sessions carry no trial counts", platform.name()));
    }
    PlatformCalibration pooled = latest->calibration;
    pooled.c_p_ns = static_cast<double>(weighted / static_cast<long double>(total));
    pooled.n_trials = total;
    pooled.trial_medians_ns.clear();
    double lo = sessions.front().calibration.median_range_ns.first;
    double hi = sessions.front().calibration.median_range_ns.second;
    double slo = sessions.front().calibration.std_range_ns.first;
    double shi = sessions.front().calibration.std_range_ns.second;
    double tol = 0.0;
    for (const auto &s : sessions) {
        lo = std::min(lo, s.calibration.median_range_ns.first);
        hi = std::max(hi, s.calibration.median_range_ns.second);
        slo = std::min(slo, s.calibration.std_range_ns.first);
        shi = std::max(shi, s.calibration.std_range_ns.second);
        tol = std::max(tol, s.calibration.tolerance_ns);
        pooled.trial_medians_ns.insert(pooled.trial_medians_ns.end(), s.calibration.trial_medians_ns.begin(),
                                       s.calibration.trial_medians_ns.end());
    }
    pooled.median_range_ns = {lo, hi};
    pooled.std_range_ns = {slo, shi};
    pooled.tolerance_ns = tol;
    return pooled;
}

void update_store(const std::filesystem::path &path, const std::function<void(CalibrationStore &)> &mutate)
{
    auto lock_path = path;
    lock_path += ".lock";
    FileLock lock(lock_path);
    auto store = CalibrationStore::load(path);
    mutate(store);
    store.save(path);
}

}  // namespace pulsecal

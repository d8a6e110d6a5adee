// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "pulsecal/error.hpp"

namespace pulsecal {

namespace {

constexpr std::size_t kMaxGridWarnings = 5;

std::string_view trim(std::string_view s)
{
    const auto *ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

template <typename Int>
bool parse_int(std::string_view text, Int &out)
{
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end && !text.empty();
}

bool looks_numeric(std::string_view field)
{
    return !field.empty() && (std::isdigit(static_cast<unsigned char>(field.front())) || field.front() == '-' ||
                              field.front() == '+' || field.front() == '.');
}

std::ifstream open_or_throw(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path.string(), 0, "cannot open file");
    }
    return in;
}

class GridChecker {
public:
    GridChecker(Nanos quantum, std::vector<std::string> &warnings) : quantum_(quantum), warnings_(warnings) {}

    void check(Nanos ts, std::size_t line)
    {
        if (quantum_ <= 0 || ts % quantum_ == 0) {
            return;
        }
        if (++off_grid_ <= kMaxGridWarnings) {
            warnings_.push_back(
                fmt::format("line {}: timestamp {} ns is off the {} ns sample grid", line, ts, quantum_));
        }
    }

    void finish()
    {
        if (off_grid_ > kMaxGridWarnings) {
            warnings_.push_back(fmt::format("{} further off-grid timestamps", off_grid_ - kMaxGridWarnings));
        }
    }

private:
    Nanos quantum_;
    std::vector<std::string> &warnings_;
    std::size_t off_grid_ = 0;
};

void parse_native(std::istream &in, const std::string &source, CaptureParse &result)
{
    auto &capture = result.capture;
    std::vector<std::pair<Nanos, std::size_t>> grid_pending;
    std::string raw;
    std::size_t line_no = 0;
    bool seen_header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            auto body = trim(line.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) {
                continue;
            }
            const auto key = trim(body.substr(0, eq));
            const auto value = trim(body.substr(eq + 1));
            if (key == "sample_rate_hz") {
                if (!parse_int(value, capture.sample_rate_hz) || capture.sample_rate_hz <= 0) {
                    throw ParseError(source, line_no, "invalid sample_rate_hz metadata");
                }
            } else if (key == "source_id") {
                capture.source_id = std::string(value);
            }
            continue;
        }
        const auto fields = split_csv(line);
        if (!seen_header && capture.events.empty() && !looks_numeric(fields.front())) {
            if (fields.size() != 2 || fields[0] != "timestamp_ns" || fields[1] != "direction") {
                throw ParseError(source, line_no, "expected header 'timestamp_ns,direction'");
            }
            seen_header = true;
            continue;
        }
        if (fields.size() != 2) {
            throw ParseError(source, line_no, fmt::format("expected 2 fields, got {}", fields.size()));
        }
        Nanos ts = 0;
        if (!parse_int(fields[0], ts)) {
            throw ParseError(source, line_no, fmt::format("malformed timestamp '{}'", fields[0]));
        }
        if (ts < 0) {
            throw ParseError(source, line_no, "negative timestamp");
        }
        Direction dir;
        if (fields[1] == "R") {
            dir = Direction::Rising;
        } else if (fields[1] == "F") {
            dir = Direction::Falling;
        } else {
            throw ParseError(source, line_no, fmt::format("direction must be R or F, got '{}'", fields[1]));
        }
        if (!capture.events.empty() && ts <= capture.events.back().timestamp) {
            throw ParseError(source, line_no,
                             fmt::format("non-monotonic timestamp {} after {}", ts, capture.events.back().timestamp));
        }
        capture.events.push_back({ts, dir});
        grid_pending.emplace_back(ts, line_no);
    }
    // Metadata may legally follow the header, so the grid check runs once the rate is final.
    GridChecker grid(capture.sample_quantum_ns(), result.warnings);
    for (const auto &[ts, line] : grid_pending) {
        grid.check(ts, line);
    }
    grid.finish();
}

void parse_analyzer(std::istream &in, const std::string &source, CaptureParse &result)
{
    auto &capture = result.capture;
    GridChecker grid(capture.sample_quantum_ns(), result.warnings);
    std::string raw;
    std::size_t line_no = 0;
    bool any_row = false;
    int level = -1;
    Nanos last_ts = -1;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto fields = split_csv(line);
        if (!any_row && !looks_numeric(fields.front())) {
            continue;  // column header, names vary between exporter versions
        }
        if (fields.size() != 2) {
            throw ParseError(source, line_no, fmt::format("expected 2 fields, got {}", fields.size()));
        }
        Nanos ts = 0;
        try {
            ts = decimal_seconds_to_ns(fields[0]);
        } catch (const std::exception &e) {
            throw ParseError(source, line_no, fmt::format("malformed time '{}': {}", fields[0], e.what()));
        }
        if (ts < 0) {
            throw ParseError(source, line_no, "negative time");
        }
        int row_level = 0;
        if (fields[1] == "1") {
            row_level = 1;
        } else if (fields[1] != "0") {
            throw ParseError(source, line_no, fmt::format("level must be 0 or 1, got '{}'", fields[1]));
        }
        if (any_row && ts < last_ts) {
            throw ParseError(source, line_no, fmt::format("non-monotonic time {} ns after {} ns", ts, last_ts));
        }
        any_row = true;
        if (row_level == level) {
            last_ts = ts;
            continue;  // collapse equal-level rows
        }
        if (!capture.events.empty() && ts == capture.events.back().timestamp) {
            throw ParseError(source, line_no, fmt::format("two transitions at the same time {} ns", ts));
        }
        capture.events.push_back({ts, row_level == 1 ? Direction::Rising : Direction::Falling});
        grid.check(ts, line_no);
        level = row_level;
        last_ts = ts;
    }
    grid.finish();
}

InferenceRecord record_from_json(const nlohmann::json &j, const std::string &source, std::size_t line_no)
{
    auto require = [&](const char *key) -> const nlohmann::json & {
        const auto it = j.find(key);
        if (it == j.end()) {
            throw ParseError(source, line_no, fmt::format("missing field '{}'", key));
        }
        return *it;
    };
    auto as_ns = [&](const char *key) {
        const auto &v = require(key);
        if (!v.is_number_integer()) {
            throw ParseError(source, line_no, fmt::format("field '{}' must be an integer", key));
        }
        return v.get<Nanos>();
    };
    InferenceRecord r;
    const auto &trial = require("trial_id");
    if (!trial.is_string() || trial.get<std::string>().empty()) {
        throw ParseError(source, line_no, "trial_id must be a nonempty string");
    }
    r.trial_id = trial.get<std::string>();
    const auto &index = require("index");
    if (!index.is_number_unsigned()) {
        throw ParseError(source, line_no, "index must be a nonnegative integer");
    }
    r.index = index.get<std::uint64_t>();
    r.t0 = as_ns("t0_ns");
    r.t1 = as_ns("t1_ns");
    r.t2 = as_ns("t2_ns");
    r.t3 = as_ns("t3_ns");
    if (!(r.t0 < r.t1)) {
        throw ParseError(source, line_no, "timestamp ordering violated: t0 < t1");
    }
    if (!(r.t1 <= r.t2)) {
        throw ParseError(source, line_no, "timestamp ordering violated: t1 <= t2");
    }
    if (!(r.t2 < r.t3)) {
        throw ParseError(source, line_no, "timestamp ordering violated: t2 < t3");
    }
    return r;
}

}  // namespace

CaptureFormat parse_capture_format(std::string_view text)
{
    if (text == "native" || text == "native_ns") {
        return CaptureFormat::NativeNs;
    }
    if (text == "analyzer" || text == "analyzer_seconds") {
        return CaptureFormat::AnalyzerSeconds;
    }
    throw ConfigError(fmt::format("unknown capture format '{}'", text));
}

Nanos decimal_seconds_to_ns(std::string_view text)
{
    text = trim(text);
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    std::string digits;
    std::int64_t exp10 = 0;
    std::size_t i = 0;
    bool any_digit = false;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
        digits.push_back(text[i]);
        any_digit = true;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
            digits.push_back(text[i]);
            --exp10;
            any_digit = true;
        }
    }
    if (!any_digit) {
        throw std::invalid_argument("no digits");
    }
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        std::int64_t e = 0;
        if (!parse_int(text.substr(i + 1), e) || e > 100 || e < -100) {
            throw std::invalid_argument("bad exponent");
        }
        exp10 += e;
        i = text.size();
    }
    if (i != text.size()) {
        throw std::invalid_argument("trailing characters");
    }

    // value = digits * 10^(exp10), in ns: digits * 10^(exp10 + 9)
    const std::int64_t shift = exp10 + 9;
    std::string whole;
    bool round_up = false;
    if (shift >= 0) {
        whole = digits + std::string(static_cast<std::size_t>(shift), '0');
    } else {
        const auto drop = static_cast<std::size_t>(-shift);
        std::string rest;
        if (drop >= digits.size()) {
            rest = std::string(drop - digits.size(), '0') + digits;
        } else {
            whole = digits.substr(0, digits.size() - drop);
            rest = digits.substr(digits.size() - drop);
        }
        const char lead = rest.front();
        const bool tail_nonzero = rest.find_first_not_of('0', 1) != std::string::npos;
        if (lead > '5' || (lead == '5' && tail_nonzero)) {
            round_up = true;
        } else if (lead == '5') {
            const bool odd = !whole.empty() && ((whole.back() - '0') % 2 == 1);
            round_up = odd;
        }
    }
    const auto first = whole.find_first_not_of('0');
    whole = first == std::string::npos ? std::string("0") : whole.substr(first);
    if (whole.size() > 18) {
        throw std::invalid_argument("out of range");
    }
    Nanos ns = 0;
    parse_int(std::string_view(whole), ns);
    if (round_up) {
        ++ns;
    }
    return negative ? -ns : ns;
}

CaptureParse parse_edge_capture(std::istream &in, CaptureFormat format, const CaptureOptions &options)
{
    CaptureParse result;
    result.capture.sample_rate_hz = options.sample_rate_hz;
    result.capture.source_id = options.source_id;
    const std::string source = options.source_id.empty() ? std::string("<capture>") : options.source_id;
    if (format == CaptureFormat::NativeNs) {
        parse_native(in, source, result);
    } else {
        parse_analyzer(in, source, result);
    }
    result.capture.alternating = is_alternating(result.capture.events);
    return result;
}

CaptureParse parse_edge_capture(const std::filesystem::path &path, CaptureFormat format, CaptureOptions options)
{
    auto in = open_or_throw(path);
    if (options.source_id.empty()) {
        options.source_id = path.filename().string();
    }
    return parse_edge_capture(in, format, options);
}

void write_edge_capture(std::ostream &out, const EdgeCapture &capture)
{
    out << "# sample_rate_hz=" << capture.sample_rate_hz << '\n';
    if (!capture.source_id.empty()) {
        out << "# source_id=" << capture.source_id << '\n';
    }
    out << "timestamp_ns,direction\n";
    for (const auto &e : capture.events) {
        out << e.timestamp << ',' << direction_code(e.direction) << '\n';
    }
}

std::vector<InferenceRecord> parse_orchestrator_log(std::istream &in, std::string_view source_view)
{
    const std::string source(source_view);
    std::vector<InferenceRecord> records;
    std::map<std::string, std::size_t> trial_order;
    std::set<std::pair<std::string, std::uint64_t>> seen;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error &e) {
            throw ParseError(source, line_no, fmt::format("malformed record: {}", e.what()));
        }
        if (!j.is_object()) {
            throw ParseError(source, line_no, "record must be a JSON object");
        }
        auto r = record_from_json(j, source, line_no);
        if (!seen.emplace(r.trial_id, r.index).second) {
            throw ParseError(source, line_no,
                             fmt::format("duplicate record (trial_id '{}', index {})", r.trial_id, r.index));
        }
        trial_order.emplace(r.trial_id, trial_order.size());
        records.push_back(std::move(r));
    }
    std::stable_sort(records.begin(), records.end(), [&](const InferenceRecord &a, const InferenceRecord &b) {
        const auto oa = trial_order.at(a.trial_id);
        const auto ob = trial_order.at(b.trial_id);
        return oa != ob ? oa < ob : a.index < b.index;
    });
    return records;
}

std::vector<InferenceRecord> parse_orchestrator_log(const std::filesystem::path &path)
{
    auto in = open_or_throw(path);
    return parse_orchestrator_log(in, path.string());
}

void write_orchestrator_log(std::ostream &out, std::span<const InferenceRecord> records)
{
    for (const auto &r : records) {
        // Fixed key order keeps the files byte-stable.
        out << fmt::format(R"({{"trial_id":{},"index":{},"t0_ns":{},"t1_ns":{},"t2_ns":{},"t3_ns":{}}})",
                           nlohmann::json(r.trial_id).dump(), r.index, r.t0, r.t1, r.t2, r.t3)
            << '\n';
    }
}

std::vector<TrialRecords> group_by_trial(std::span<const InferenceRecord> records)
{
    std::vector<TrialRecords> trials;
    for (const auto &r : records) {
        if (trials.empty() || trials.back().trial_id != r.trial_id) {
            trials.push_back({r.trial_id, {}});
        }
        trials.back().records.push_back(r);
    }
    return trials;
}

std::vector<ProfileSample> parse_profile_log(std::istream &in, std::string_view source_view)
{
    const std::string source(source_view);
    std::vector<ProfileSample> samples;
    std::set<std::uint64_t> seen;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto fields = split_csv(line);
        if (samples.empty() && !looks_numeric(fields.front())) {
            if (fields.size() != 3 || fields[0] != "iteration" || fields[1] != "high_ns" || fields[2] != "low_ns") {
                throw ParseError(source, line_no, "expected header 'iteration,high_ns,low_ns'");
            }
            continue;
        }
        if (fields.size() != 3) {
            throw ParseError(source, line_no, fmt::format("expected 3 fields, got {}", fields.size()));
        }
        ProfileSample s;
        if (!parse_int(fields[0], s.iteration) || !parse_int(fields[1], s.high_ns) ||
            !parse_int(fields[2], s.low_ns)) {
            throw ParseError(source, line_no, "malformed profile row");
        }
        if (s.high_ns <= 0 || s.low_ns <= 0) {
            throw ParseError(source, line_no, "call durations must be positive");
        }
        if (!seen.insert(s.iteration).second) {
            throw ParseError(source, line_no, fmt::format("duplicate iteration {}", s.iteration));
        }
        samples.push_back(s);
    }
    std::stable_sort(samples.begin(), samples.end(),
                     [](const ProfileSample &a, const ProfileSample &b) { return a.iteration < b.iteration; });
    return samples;
}

std::vector<ProfileSample> parse_profile_log(const std::filesystem::path &path)
{
    auto in = open_or_throw(path);
    return parse_profile_log(in, path.string());
}

void write_profile_log(std::ostream &out, std::span<const ProfileSample> samples)
{
    out << "iteration,high_ns,low_ns\n";
    for (const auto &s : samples) {
        out << s.iteration << ',' << s.high_ns << ',' << s.low_ns << '\n';
    }
}

}  // namespace pulsecal

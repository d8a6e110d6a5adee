// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "pulsecal/error.hpp"

namespace pulsecal {

namespace {

nlohmann::json opt(const std::optional<double> &v)
{
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

ReportFormat parse_report_format(std::string_view text)
{
    if (text == "csv") {
        return ReportFormat::Csv;
    }
    if (text == "text") {
        return ReportFormat::Text;
    }
    if (text == "structured" || text == "json") {
        return ReportFormat::Structured;
    }
    throw ConfigError(fmt::format("unknown report format '{}'", text));
}

std::string us2(double ns)
{
    auto s = fmt::format("{:.2f}", ns / kNanosPerMicro);
    if (s == "-0.00") {
        s = "0.00";
    }
    return s;
}

double round_us2(double ns)
{
    return std::stod(us2(ns));
}

std::string Report::render(ReportFormat format) const
{
    switch (format) {
    case ReportFormat::Csv:
        return csv;
    case ReportFormat::Text:
        return text;
    case ReportFormat::Structured:
        return structured.dump(2) + "\n";
    }
    return text;
}

Report calibration_report(const PlatformCalibration &cal, std::span<const TrialStats> stats)
{
    Report r;
    const auto &tag = cal.tag;
    r.text += fmt::format("{:<10} {:<12} {:>10} {:>22} {:>18} {:>4} {:>10}\n", "platform", "session", "C_p(us)",
                          "trial medians(us)", "std(delta)(us)", "n", "tau(us)");
    r.text += fmt::format("{:<10} {:<12} {:>10} {:>22} {:>18} {:>4} {:>10}\n", tag.platform.name(), tag.session_id,
                          us2(cal.c_p_ns),
                          fmt::format("{}, {}", us2(cal.median_range_ns.first), us2(cal.median_range_ns.second)),
                          fmt::format("{}, {}", us2(cal.std_range_ns.first), us2(cal.std_range_ns.second)),
                          cal.n_trials, us2(cal.tolerance_ns));
    r.text += fmt::format("trial medians span {} us; tau = {} x worst within-trial std\n",
                          us2(cal.median_range_ns.second - cal.median_range_ns.first), cal.k_factor);
    r.text += fmt::format("\n{:<8} {:>6} {:>12} {:>10} {:>12} {:>12}\n", "trial", "n", "median(us)", "std(us)",
                          "min(us)", "max(us)");
    r.csv = "trial_id,n,median_ns,sample_std_ns,min_ns,max_ns\n";
    nlohmann::json trials = nlohmann::json::array();
    for (const auto &s : stats) {
        r.text += fmt::format("{:<8} {:>6} {:>12} {:>10} {:>12} {:>12}\n", s.trial_id, s.n, us2(s.median_ns),
                              s.sample_std_ns ? us2(*s.sample_std_ns) : std::string("-"),
                              us2(static_cast<double>(s.min_ns)), us2(static_cast<double>(s.max_ns)));
        r.csv += fmt::format("{},{},{},{},{},{}\n", s.trial_id, s.n, s.median_ns,
                             s.sample_std_ns ? fmt::format("{}", *s.sample_std_ns) : std::string(), s.min_ns,
                             s.max_ns);
        trials.push_back({{"trial_id", s.trial_id},
                          {"n", s.n},
                          {"median_ns", s.median_ns},
                          {"sample_std_ns", opt(s.sample_std_ns)},
                          {"min_ns", s.min_ns},
                          {"max_ns", s.max_ns}});
    }
    r.csv += fmt::format("# platform={},session={},c_p_ns={},tolerance_ns={},k={},n_trials={}\n", tag.platform.name(),
                         tag.session_id, cal.c_p_ns, cal.tolerance_ns, cal.k_factor, cal.n_trials);
    r.structured = {
        {"platform", tag.platform.name()},
        {"session_id", tag.session_id},
        {"state_label", tag.state_label},
        {"captured_at", tag.captured_at},
        {"c_p_ns", cal.c_p_ns},
        {"c_p_us", round_us2(cal.c_p_ns)},
        {"median_range_ns", {cal.median_range_ns.first, cal.median_range_ns.second}},
        {"std_range_ns", {cal.std_range_ns.first, cal.std_range_ns.second}},
        {"n_trials", cal.n_trials},
        {"tolerance_ns", cal.tolerance_ns},
        {"k_factor", cal.k_factor},
        {"trials", trials},
    };
    return r;
}

Report sweep_report(std::span<const SweepRow> rows, std::size_t expected_count, std::string_view platform)
{
    Report r;
    r.text += fmt::format("glitch filter sweep, {} (expected pulse pairs {})\n", platform, expected_count);
    r.text += fmt::format("{:>12} {:>14} {:>18} {:>16}  {}\n", "filter(ns)", "pairs", "median delta(us)", "C_p(us)",
                          "note");
    r.csv = "threshold_ns,edges_retained,pair_count,status,violations,median_delta_ns,c_p_ns\n";
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto &row : rows) {
        const auto pairs = row.status == Status::Pass ? fmt::format("{}", row.pair_count)
                                                      : fmt::format("{} (FAIL)", row.pair_count);
        r.text += fmt::format("{:>12} {:>14} {:>18} {:>16}  {}\n", row.threshold_ns, pairs,
                              row.median_delta_ns ? us2(*row.median_delta_ns) : std::string("-"),
                              row.c_p_ns ? us2(*row.c_p_ns) : std::string("-"), row.note);
        r.csv += fmt::format("{},{},{},{},{},{},{}\n", row.threshold_ns, row.edges_retained, row.pair_count,
                             to_string(row.status), row.violations,
                             row.median_delta_ns ? fmt::format("{}", *row.median_delta_ns) : std::string(),
                             row.c_p_ns ? fmt::format("{}", *row.c_p_ns) : std::string());
        jrows.push_back({{"threshold_ns", row.threshold_ns},
                         {"edges_retained", row.edges_retained},
                         {"pair_count", row.pair_count},
                         {"status", to_string(row.status)},
                         {"violations", row.violations},
                         {"median_delta_ns", opt(row.median_delta_ns)},
                         {"c_p_ns", opt(row.c_p_ns)},
                         {"note", row.note}});
    }
    r.text += fmt::format("recommended filter: {} ns\n", kRecommendedFilterNs);
    r.structured = {{"platform", platform},
                    {"expected_count", expected_count},
                    {"recommended_filter_ns", kRecommendedFilterNs},
                    {"rows", jrows}};
    return r;
}

Report profile_report(const ProfileComparison &c, std::string_view platform)
{
    Report r;
    r.text = fmt::format("{:<10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>12} {:>10}\n", "platform", "med(H)",
                         "med(L)", "med(H+L)", "|C_p|", "coverage", "residual(us)", "over-pred");
    r.text += fmt::format("{:<10} {:>10} {:>10} {:>10} {:>10} {:>9.2f}% {:>12} {:>9.1f}%\n", platform,
                          us2(c.med_high_ns), us2(c.med_low_ns), us2(c.med_sum_ns), us2(c.c_p_abs_ns),
                          100.0 * c.coverage_ratio, us2(c.residual_ns), 100.0 * c.over_prediction_fraction);
    r.csv = "platform,med_high_ns,med_low_ns,med_sum_ns,c_p_abs_ns,coverage_ratio,residual_ns,over_prediction_fraction\n";
    r.csv += fmt::format("{},{},{},{},{},{},{},{}\n", platform, c.med_high_ns, c.med_low_ns, c.med_sum_ns,
                         c.c_p_abs_ns, c.coverage_ratio, c.residual_ns, c.over_prediction_fraction);
    r.structured = {{"platform", platform},
                    {"med_high_ns", c.med_high_ns},
                    {"med_low_ns", c.med_low_ns},
                    {"med_sum_ns", c.med_sum_ns},
                    {"c_p_abs_ns", c.c_p_abs_ns},
                    {"coverage_ratio", c.coverage_ratio},
                    {"residual_ns", c.residual_ns},
                    {"over_prediction_fraction", c.over_prediction_fraction}};
    return r;
}

Report drift_report_view(const DriftReport &d)
{
    Report r;
    r.text = fmt::format("session drift, {}\n", d.platform);
    r.csv = "platform,session_id,c_p_ns\n";
    nlohmann::json sessions = nlohmann::json::array();
    for (std::size_t i = 0; i < d.session_ids.size(); ++i) {
        r.text += fmt::format("  {:<16} {:>10} us\n", d.session_ids[i], us2(d.session_constants_ns[i]));
        r.csv += fmt::format("{},{},{}\n", d.platform, d.session_ids[i], d.session_constants_ns[i]);
        sessions.push_back({{"session_id", d.session_ids[i]}, {"c_p_ns", d.session_constants_ns[i]}});
    }
    r.text += fmt::format("range {} us, threshold {} us: {}\n", us2(d.range_ns), us2(d.threshold_ns),
                          d.flagged ? "FLAGGED" : "ok");
    r.csv += fmt::format("# range_ns={},threshold_ns={},flagged={}\n", d.range_ns, d.threshold_ns, d.flagged);
    r.structured = {{"platform", d.platform},
                    {"sessions", sessions},
                    {"range_ns", d.range_ns},
                    {"threshold_ns", d.threshold_ns},
                    {"flagged", d.flagged}};
    return r;
}

Report gate_report(const GateVerdict &v, const GateConfig &cfg, std::string_view platform)
{
    Report r;
    r.text = fmt::format("{} gate ({}, {}), tau {} us{}: {}\n", platform, to_string(cfg.mode),
                         to_string(cfg.statistic), us2(cfg.tolerance_ns),
                         cfg.mode == GateMode::PlatformAware ? fmt::format(", C_p {} us", us2(*cfg.constant_ns))
                                                             : std::string(),
                         v.accepted ? "ACCEPT" : "REJECT");
    r.text += fmt::format("worst residual {} us, failing {}/{} ({:.1f}%)\n{}\n", us2(v.worst_residual_ns), v.failing,
                          v.units, 100.0 * v.failing_fraction, v.reason);
    r.csv = "platform,mode,statistic,tolerance_ns,constant_ns,accepted,worst_residual_ns,failing_fraction,units\n";
    r.csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", platform, to_string(cfg.mode), to_string(cfg.statistic),
                         cfg.tolerance_ns, cfg.constant_ns ? fmt::format("{}", *cfg.constant_ns) : std::string(),
                         v.accepted, v.worst_residual_ns, v.failing_fraction, v.units);
    r.structured = {{"platform", platform},
                    {"mode", to_string(cfg.mode)},
                    {"statistic", to_string(cfg.statistic)},
                    {"tolerance_ns", cfg.tolerance_ns},
                    {"constant_ns", opt(cfg.constant_ns)},
                    {"accepted", v.accepted},
                    {"worst_residual_ns", v.worst_residual_ns},
                    {"mean_residual_ns", v.mean_residual_ns},
                    {"failing_fraction", v.failing_fraction},
                    {"units", v.units},
                    {"failing", v.failing},
                    {"reason", v.reason}};
    return r;
}

Report gate_comparison_report(const GateComparison &cmp)
{
    Report r;
    r.text = fmt::format("gate comparison, tau {} us, statistic {}\n", us2(cmp.tau_ns), to_string(cmp.statistic));
    r.text += fmt::format("{:<16} {:<8} {:>12} {:>8} {:>12} {:>12}\n", "mode", "platform", "ref(us)", "verdict",
                          "worst(us)", "margin(us)");
    r.csv = "mode,platform,reference_ns,accepted,worst_residual_ns,mean_residual_ns,margin_ns\n";
    nlohmann::json cells = nlohmann::json::array();
    for (const auto &c : cmp.cells) {
        r.text += fmt::format("{:<16} {:<8} {:>12} {:>8} {:>12} {:>12}\n", to_string(c.mode), c.platform,
                              us2(c.reference_ns), c.verdict.accepted ? "accept" : "reject",
                              us2(c.verdict.worst_residual_ns), us2(c.margin_ns));
        r.csv += fmt::format("{},{},{},{},{},{},{}\n", to_string(c.mode), c.platform, c.reference_ns,
                             c.verdict.accepted, c.verdict.worst_residual_ns, c.verdict.mean_residual_ns, c.margin_ns);
        cells.push_back({{"mode", to_string(c.mode)},
                         {"platform", c.platform},
                         {"reference_ns", c.reference_ns},
                         {"accepted", c.verdict.accepted},
                         {"worst_residual_ns", c.verdict.worst_residual_ns},
                         {"mean_residual_ns", c.verdict.mean_residual_ns},
                         {"units", c.verdict.units},
                         {"failing", c.verdict.failing},
                         {"margin_ns", c.margin_ns},
                         {"margin_us", round_us2(c.margin_ns)}});
    }
    r.structured = {{"tau_ns", cmp.tau_ns}, {"statistic", to_string(cmp.statistic)}, {"cells", cells}};
    return r;
}

nlohmann::json RunManifest::to_json() const
{
    nlohmann::json in = nlohmann::json::array();
    for (const auto &i : inputs) {
        in.push_back({{"path", i.path}, {"sha256", i.digest}});
    }
    return {{"command", command},
            {"inputs", in},
            {"config", config},
            {"tool_version", tool_version},
            {"outputs", outputs},
            {"created_at", created_at}};
}

std::string tool_version()
{
    return PULSECAL_VERSION;
}

}  // namespace pulsecal

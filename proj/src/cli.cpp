// SPDX-License-Identifier: Apache-2.0
#include "pulsecal/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pulsecal/digest.hpp"
#include "pulsecal/error.hpp"
#include "pulsecal/gate.hpp"
#include "pulsecal/ingest.hpp"
#include "pulsecal/pipeline.hpp"
#include "pulsecal/report.hpp"
#include "pulsecal/sensitivity.hpp"
#include "pulsecal/store.hpp"
#include "pulsecal/synth.hpp"

namespace pulsecal::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char *kScenarioEnvVar = "PULSECAL_SCENARIOS";

struct InputFlags {
    std::string dataset;
    std::vector<std::string> captures;
    std::string log;
    std::string capture_format = "native";
    std::int64_t sample_rate_hz = 100'000'000;
};

struct PipelineFlags {
    Nanos filter_ns = kRecommendedFilterNs;
    std::string convention = "outer";
    std::size_t warmup_exclude = kDefaultWarmupExclude;
    double k = kDefaultToleranceK;
    std::optional<double> tau_ns;
    Nanos gap_ns = kDefaultGapThresholdNs;
};

struct OutputFlags {
    std::string format = "text";
    std::string report_dir;
    std::string manifest;
    std::string store;
};

struct Context {
    std::ostream &out;
    std::ostream &err;
    RunManifest manifest;
};

void add_inputs(CLI::App *cmd, InputFlags &in, const std::string &prefix = "")
{
    cmd->add_option("--" + prefix + "dataset", in.dataset,
                    "Dataset directory holding capture.csv and orchestrator.jsonl");
    cmd->add_option("--" + prefix + "capture", in.captures,
                    "Edge capture; repeat for one file per trial (skips gap segmentation)");
    cmd->add_option("--" + prefix + "log", in.log, "Orchestrator log (JSON lines)");
    if (prefix.empty()) {
        cmd->add_option("--capture-format", in.capture_format, "native or analyzer")
            ->check(CLI::IsMember({"native", "analyzer"}));
        cmd->add_option("--sample-rate-hz", in.sample_rate_hz, "Analyzer sample rate when the file does not say");
    }
}

void add_pipeline(CLI::App *cmd, PipelineFlags &p)
{
    cmd->add_option("--filter-ns", p.filter_ns, "Glitch filter dwell threshold")->capture_default_str();
    cmd->add_option("--perf-convention", p.convention, "outer (t3-t0) or inner (t2-t1)")
        ->check(CLI::IsMember({"outer", "inner"}))
        ->capture_default_str();
    cmd->add_option("--warmup-exclude", p.warmup_exclude, "Leading inferences per trial left out of statistics")
        ->capture_default_str();
    cmd->add_option("--k", p.k, "Tolerance factor on the worst within-trial std")->capture_default_str();
    cmd->add_option("--tau-ns", p.tau_ns, "Residual tolerance; overrides the derived value");
    cmd->add_option("--gap-ns", p.gap_ns, "Inter-trial gap threshold for segmentation")->capture_default_str();
}

void add_outputs(CLI::App *cmd, OutputFlags &o, bool with_store)
{
    cmd->add_option("--format", o.format, "Report format on stdout: csv, text or structured")
        ->check(CLI::IsMember({"csv", "text", "structured"}))
        ->capture_default_str();
    cmd->add_option("--report-dir", o.report_dir, "Also write report.{txt,csv,json} and manifest.json here");
    cmd->add_option("--manifest", o.manifest, "Run manifest path");
    if (with_store) {
        cmd->add_option("--store", o.store, fmt::format("Calibration store file (default ${})", kStoreEnvVar));
    }
}

nlohmann::json pipeline_json(const PipelineFlags &p)
{
    return {{"filter_ns", p.filter_ns},
            {"perf_convention", p.convention},
            {"warmup_exclude", p.warmup_exclude},
            {"k", p.k},
            {"tau_ns", p.tau_ns ? nlohmann::json(*p.tau_ns) : nlohmann::json(nullptr)},
            {"gap_ns", p.gap_ns}};
}

PipelineOptions pipeline_options(const PipelineFlags &p)
{
    if (p.filter_ns < 0) {
        throw ConfigError("--filter-ns must be >= 0");
    }
    if (p.gap_ns <= 0) {
        throw ConfigError("--gap-ns must be > 0");
    }
    return {p.filter_ns, parse_perf_convention(p.convention), p.warmup_exclude, p.gap_ns};
}

fs::path resolve_store(const OutputFlags &o)
{
    if (!o.store.empty()) {
        return o.store;
    }
    if (const char *env = std::getenv(kStoreEnvVar); env != nullptr && *env != '\0') {
        return env;
    }
    throw ConfigError(fmt::format("no calibration store: pass --store or set {}", kStoreEnvVar));
}

void note_input(Context &ctx, const fs::path &path)
{
    ctx.manifest.inputs.push_back({path.string(), file_sha256(path)});
}

struct LoadedInputs {
    std::vector<EdgeCapture> captures;
    std::vector<InferenceRecord> records;
    std::vector<TrialRecords> trials;
    std::vector<fs::path> paths;
};

LoadedInputs load_inputs(const InputFlags &in, Context &ctx)
{
    std::vector<fs::path> capture_paths(in.captures.begin(), in.captures.end());
    fs::path log_path = in.log;
    if (!in.dataset.empty()) {
        const auto files = dataset_files(in.dataset);
        if (capture_paths.empty()) {
            capture_paths.push_back(files.capture);
        }
        if (log_path.empty()) {
            log_path = files.orchestrator_log;
        }
    }
    if (capture_paths.empty() || log_path.empty()) {
        throw ConfigError("need an edge capture and an orchestrator log (--dataset or --capture/--log)");
    }
    LoadedInputs loaded;
    const auto format = parse_capture_format(in.capture_format);
    for (const auto &p : capture_paths) {
        CaptureOptions opts;
        opts.sample_rate_hz = in.sample_rate_hz;
        auto parsed = parse_edge_capture(p, format, opts);
        for (const auto &w : parsed.warnings) {
            ctx.err << "warning: " << p.string() << ": " << w << '\n';
        }
        loaded.captures.push_back(std::move(parsed.capture));
        note_input(ctx, p);
        loaded.paths.push_back(p);
    }
    loaded.records = parse_orchestrator_log(log_path);
    loaded.trials = group_by_trial(loaded.records);
    note_input(ctx, log_path);
    loaded.paths.push_back(log_path);
    return loaded;
}

void emit(Context &ctx, const Report &report, const OutputFlags &o, const std::string &command)
{
    const auto format = parse_report_format(o.format);
    ctx.out << report.render(format);
    fs::path manifest_path = o.manifest;
    if (!o.report_dir.empty()) {
        fs::create_directories(o.report_dir);
        const fs::path dir = o.report_dir;
        const std::pair<const char *, ReportFormat> files[] = {
            {"report.txt", ReportFormat::Text}, {"report.csv", ReportFormat::Csv}, {"report.json", ReportFormat::Structured}};
        for (const auto &[name, fmt_kind] : files) {
            std::ofstream f(dir / name, std::ios::trunc);
            f << report.render(fmt_kind);
            ctx.manifest.outputs.push_back((dir / name).string());
        }
        if (manifest_path.empty()) {
            manifest_path = dir / "manifest.json";
        }
    }
    if (manifest_path.empty()) {
        manifest_path = fmt::format("pulsecal-{}-manifest.json", command);
    }
    ctx.manifest.command = command;
    ctx.manifest.tool_version = tool_version();
    ctx.manifest.created_at = utc_now_iso8601();
    std::ofstream f(manifest_path, std::ios::trunc);
    if (!f) {
        throw Error(fmt::format("cannot write manifest '{}'", manifest_path.string()));
    }
    f << ctx.manifest.to_json().dump(2) << '\n';
}

OperatingStateTag make_tag(const std::string &platform, const std::string &session, const std::string &label,
                           const std::string &captured_at)
{
    if (platform.empty()) {
        throw ConfigError("--platform is required");
    }
    OperatingStateTag tag;
    tag.platform = PlatformId::parse(platform);
    tag.session_id = session;
    tag.state_label = label;
    tag.captured_at = captured_at.empty() ? utc_now_iso8601() : captured_at;
    return tag;
}

fs::path resolve_scenario(const std::string &name, const std::string &dir_flag)
{
    if (fs::exists(name)) {
        return name;
    }
    fs::path dir = dir_flag;
    if (dir.empty()) {
        const char *env = std::getenv(kScenarioEnvVar);
        dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path(PULSECAL_DEFAULT_SCENARIO_DIR);
    }
    auto candidate = dir / (name + ".json");
    if (!fs::exists(candidate)) {
        throw ConfigError(fmt::format("scenario '{}' not found (looked in {})", name, dir.string()));
    }
    return candidate;
}

std::optional<double> constant_flag(const std::optional<double> &ns, const std::optional<double> &us)
{
    if (ns && us) {
        throw ConfigError("pass the platform constant in ns or in us, not both");
    }
    if (us) {
        return *us * kNanosPerMicro;
    }
    return ns;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Hardware-validated inference timing: calibration, gates, sweeps and drift", "pulsecal"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());

    Context ctx{out, err, {}};

    // synth
    std::string scenario_name, scenario_dir, synth_out;
    std::optional<std::uint64_t> seed_override;
    auto *synth = app.add_subcommand("synth", "Generate a synthetic dataset from a scenario");
    synth->add_option("--scenario", scenario_name, "Scenario name or path")->required();
    synth->add_option("--scenarios-dir", scenario_dir, "Directory of scenario files");
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--seed", seed_override, "Override the scenario seed");

    // calibrate
    InputFlags cal_in;
    PipelineFlags cal_p;
    OutputFlags cal_o;
    std::string cal_platform, cal_session = "session", cal_label = "calibrated-C0", cal_captured, cal_created;
    bool cal_record = false;
    auto *calibrate = app.add_subcommand("calibrate", "Per-platform constant from a capture and orchestrator log");
    add_inputs(calibrate, cal_in);
    add_pipeline(calibrate, cal_p);
    add_outputs(calibrate, cal_o, true);
    calibrate->add_option("--platform", cal_platform, "jetson, pi or another name")->required();
    calibrate->add_option("--session", cal_session, "Session id")->capture_default_str();
    calibrate->add_option("--state-label", cal_label, "Operating-state label")->capture_default_str();
    calibrate->add_option("--captured-at", cal_captured, "Capture timestamp (default: now)");
    calibrate->add_option("--created-at", cal_created, "Store entry timestamp, YYYY-MM-DDTHH:MM:SSZ (default: now)");
    calibrate->add_flag("--record", cal_record, "Write the calibration to the store");

    // validate
    InputFlags val_in;
    PipelineFlags val_p;
    OutputFlags val_o;
    std::string val_platform, val_mode = "platform-aware", val_stat = "trial-median", val_policy = "latest";
    std::optional<double> val_cp_ns, val_cp_us;
    auto *validate = app.add_subcommand("validate", "Evaluate the validation gate on a dataset");
    add_inputs(validate, val_in);
    add_pipeline(validate, val_p);
    add_outputs(validate, val_o, true);
    validate->add_option("--platform", val_platform, "Platform for store lookup")->required();
    validate->add_option("--mode", val_mode, "platform-aware or uniform")->capture_default_str();
    validate->add_option("--statistic", val_stat, "trial-median or per-inference")->capture_default_str();
    validate->add_option("--c-p-ns", val_cp_ns, "Platform constant (skips the store)");
    validate->add_option("--c-p-us", val_cp_us, "Platform constant in microseconds");
    validate->add_option("--policy", val_policy, "Store lookup policy: latest or pooled")->capture_default_str();

    // sweep
    InputFlags sw_in;
    PipelineFlags sw_p;
    OutputFlags sw_o;
    std::vector<Nanos> sw_thresholds(kDefaultSweepThresholdsNs.begin(), kDefaultSweepThresholdsNs.end());
    std::optional<std::size_t> sw_expected;
    std::string sw_platform = "capture";
    auto *sweep = app.add_subcommand("sweep", "Pair counts and median residual across glitch-filter thresholds");
    add_inputs(sweep, sw_in);
    add_pipeline(sweep, sw_p);
    add_outputs(sweep, sw_o, false);
    sweep->add_option("--thresholds", sw_thresholds, "Filter thresholds in ns")->delimiter(',');
    sweep->add_option("--expected", sw_expected, "Expected pulse pairs (default: record count)");
    sweep->add_option("--platform", sw_platform, "Label for the report");

    // profile-compare
    OutputFlags pc_o;
    std::string pc_profile, pc_dataset, pc_platform = "profile", pc_policy = "latest";
    std::size_t pc_warmup = kDefaultProfileWarmup;
    std::optional<double> pc_cp_ns, pc_cp_us, pc_sum_us, pc_high_us, pc_low_us;
    auto *profile = app.add_subcommand("profile-compare", "Compare direct GPIO call durations with C_p");
    add_outputs(profile, pc_o, true);
    profile->add_option("--profile", pc_profile, "Profile log (iteration,high_ns,low_ns)");
    profile->add_option("--dataset", pc_dataset, "Dataset directory holding profile.csv");
    profile->add_option("--profile-warmup", pc_warmup, "Leading iterations to drop")->capture_default_str();
    profile->add_option("--platform", pc_platform, "Platform (store lookup and report label)");
    profile->add_option("--c-p-ns", pc_cp_ns, "Platform constant (skips the store)");
    profile->add_option("--c-p-us", pc_cp_us, "Platform constant in microseconds");
    profile->add_option("--policy", pc_policy, "Store lookup policy")->capture_default_str();
    profile->add_option("--med-sum-us", pc_sum_us, "Use a known med(H+L) instead of a profile log");
    profile->add_option("--med-high-us", pc_high_us, "Known med(H), report only");
    profile->add_option("--med-low-us", pc_low_us, "Known med(L), report only");

    // drift
    OutputFlags dr_o;
    std::string dr_platform;
    double dr_threshold = kDefaultDriftThresholdNs;
    auto *drift = app.add_subcommand("drift", "Cross-session range of recorded constants");
    add_outputs(drift, dr_o, true);
    drift->add_option("--platform", dr_platform, "Platform")->required();
    drift->add_option("--threshold-ns", dr_threshold, "Flag when the range exceeds this")->capture_default_str();

    // record
    OutputFlags rec_o;
    std::string rec_platform, rec_session, rec_label = "calibrated-C0", rec_captured, rec_created;
    std::optional<double> rec_cp_ns, rec_cp_us, rec_tol_ns;
    std::size_t rec_n = 1;
    auto *record = app.add_subcommand("record", "Record a session-level constant known from elsewhere");
    add_outputs(record, rec_o, true);
    record->add_option("--platform", rec_platform, "Platform")->required();
    record->add_option("--session", rec_session, "Session id")->required();
    record->add_option("--state-label", rec_label, "Operating-state label")->capture_default_str();
    record->add_option("--c-p-ns", rec_cp_ns, "Session constant");
    record->add_option("--c-p-us", rec_cp_us, "Session constant in microseconds");
    record->add_option("--n-trials", rec_n, "Trials behind the constant")->capture_default_str();
    record->add_option("--tau-ns", rec_tol_ns, "Tolerance to store with it");
    record->add_option("--captured-at", rec_captured, "Capture timestamp");
    record->add_option("--created-at", rec_created, "Entry timestamp (default: now)");

    // lookup
    OutputFlags lk_o;
    std::string lk_platform, lk_policy = "latest";
    auto *lookup = app.add_subcommand("lookup", "Print the stored constant for a platform");
    add_outputs(lookup, lk_o, true);
    lookup->add_option("--platform", lk_platform, "Platform")->required();
    lookup->add_option("--policy", lk_policy, "latest or pooled")->capture_default_str();

    // gate-compare
    InputFlags gj_in, gp_in;
    PipelineFlags gc_p;
    OutputFlags gc_o;
    std::optional<double> gc_cj, gc_cpi;
    std::string gc_stat = "trial-median";
    auto *gcompare = app.add_subcommand("gate-compare", "Uniform vs platform-aware gates on jetson and pi datasets");
    add_inputs(gcompare, gj_in, "jetson-");
    add_inputs(gcompare, gp_in, "pi-");
    add_pipeline(gcompare, gc_p);
    add_outputs(gcompare, gc_o, false);
    gcompare->add_option("--jetson-c-p-ns", gc_cj, "Jetson constant (default: calibrated from the dataset)");
    gcompare->add_option("--pi-c-p-ns", gc_cpi, "Pi constant (default: calibrated from the dataset)");
    gcompare->add_option("--statistic", gc_stat, "trial-median or per-inference")->capture_default_str();

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("pulsecal");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &a : argv_storage) {
        argv.push_back(a.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kParseOrConfigError;
    }

    try {
        if (*synth) {
            auto path = resolve_scenario(scenario_name, scenario_dir);
            auto scenario = load_scenario(path);
            if (seed_override) {
                scenario.config.seed = *seed_override;
            }
            note_input(ctx, path);
            const auto files = generate_dataset(scenario, synth_out);
            ctx.manifest.config = {{"scenario", scenario.name}, {"seed", scenario.config.seed}};
            ctx.manifest.outputs = {files.capture.string(), files.orchestrator_log.string(),
                                    files.profile_log.string(), files.manifest.string()};
            out << fmt::format("scenario {} -> {} ({} trials x {} inferences, seed {})\n", scenario.name, synth_out,
                               scenario.config.trials, scenario.config.inferences_per_trial, scenario.config.seed);
            OutputFlags o;
            o.manifest = (fs::path(synth_out) / "run_manifest.json").string();
            o.format = "text";
            emit(ctx, Report{}, o, "synth");
            return kAccept;
        }

        if (*calibrate) {
            const auto loaded = load_inputs(cal_in, ctx);
            const auto result = run_pipeline(loaded.captures, loaded.trials, pipeline_options(cal_p));
            const auto tag = make_tag(cal_platform, cal_session, cal_label, cal_captured);
            auto cal = platform_constant(result.stats, tag, cal_p.k);
            if (cal_p.tau_ns) {
                cal.tolerance_ns = *cal_p.tau_ns;
            }
            ctx.manifest.config = pipeline_json(cal_p);
            ctx.manifest.config["platform"] = tag.platform.name();
            ctx.manifest.config["session"] = tag.session_id;
            if (cal_record) {
                const auto store_path = resolve_store(cal_o);
                SessionEntry entry{tag, cal, cal_created.empty() ? utc_now_iso8601() : cal_created,
                                   combined_digest(loaded.paths)};
                std::string key;
                update_store(store_path, [&](CalibrationStore &s) { key = s.record_session(entry); });
                err << fmt::format("recorded {} in {}\n", key, store_path.string());
                ctx.manifest.outputs.push_back(store_path.string());
            }
            emit(ctx, calibration_report(cal, result.stats), cal_o, "calibrate");
            return kAccept;
        }

        if (*validate) {
            const auto loaded = load_inputs(val_in, ctx);
            const auto result = run_pipeline(loaded.captures, loaded.trials, pipeline_options(val_p));
            GateConfig cfg;
            cfg.mode = parse_gate_mode(val_mode);
            cfg.statistic = parse_gate_statistic(val_stat);
            std::optional<double> tolerance = val_p.tau_ns;
            auto constant = constant_flag(val_cp_ns, val_cp_us);
            if (cfg.mode == GateMode::PlatformAware && !constant) {
                const auto stored =
                    CalibrationStore::load(resolve_store(val_o))
                        .lookup_constant(PlatformId::parse(val_platform), parse_lookup_policy(val_policy));
                constant = stored.c_p_ns;
                if (!tolerance) {
                    tolerance = stored.tolerance_ns;
                }
            }
            if (!tolerance) {
                throw ConfigError("no tolerance: pass --tau-ns or use a stored calibration");
            }
            cfg.tolerance_ns = *tolerance;
            cfg.constant_ns = constant;
            const auto verdict = evaluate_gate(result.series, cfg);
            ctx.manifest.config = pipeline_json(val_p);
            ctx.manifest.config["mode"] = to_string(cfg.mode);
            ctx.manifest.config["statistic"] = to_string(cfg.statistic);
            ctx.manifest.config["constant_ns"] = constant ? nlohmann::json(*constant) : nlohmann::json(nullptr);
            ctx.manifest.config["tolerance_ns"] = cfg.tolerance_ns;
            emit(ctx, gate_report(verdict, cfg, val_platform), val_o, "validate");
            return verdict.accepted ? kAccept : kGateReject;
        }

        if (*sweep) {
            const auto loaded = load_inputs(sw_in, ctx);
            if (loaded.captures.size() != 1) {
                throw ConfigError("sweep takes a single capture");
            }
            const auto expected = sw_expected.value_or(loaded.records.size());
            const auto opts = pipeline_options(sw_p);
            const auto rows = filter_sweep(loaded.captures.front(), loaded.trials, sw_thresholds, expected,
                                           {opts.gap_threshold_ns, opts.warmup_exclude, opts.convention});
            ctx.manifest.config = pipeline_json(sw_p);
            ctx.manifest.config["thresholds_ns"] = sw_thresholds;
            ctx.manifest.config["expected"] = expected;
            emit(ctx, sweep_report(rows, expected, sw_platform), sw_o, "sweep");
            return kAccept;
        }

        if (*profile) {
            ProfileSummary summary;
            fs::path profile_path = pc_profile;
            if (profile_path.empty() && !pc_dataset.empty()) {
                profile_path = dataset_files(pc_dataset).profile_log;
            }
            if (!profile_path.empty()) {
                summary = profile_summary(parse_profile_log(profile_path), pc_warmup);
                note_input(ctx, profile_path);
            } else if (pc_sum_us) {
                summary.med_sum_ns = *pc_sum_us * kNanosPerMicro;
                summary.med_high_ns = pc_high_us.value_or(0.0) * kNanosPerMicro;
                summary.med_low_ns = pc_low_us.value_or(0.0) * kNanosPerMicro;
            } else {
                throw ConfigError("need --profile, --dataset or --med-sum-us");
            }
            auto constant = constant_flag(pc_cp_ns, pc_cp_us);
            if (!constant) {
                constant = CalibrationStore::load(resolve_store(pc_o))
                               .lookup_constant(PlatformId::parse(pc_platform), parse_lookup_policy(pc_policy))
                               .c_p_ns;
            }
            const auto cmp = profile_compare(summary, *constant);
            ctx.manifest.config = {{"platform", pc_platform}, {"warmup", pc_warmup}, {"c_p_ns", *constant}};
            emit(ctx, profile_report(cmp, pc_platform), pc_o, "profile-compare");
            return kAccept;
        }

        if (*drift) {
            const auto store_path = resolve_store(dr_o);
            note_input(ctx, store_path);
            const auto report = CalibrationStore::load(store_path).drift_report(PlatformId::parse(dr_platform), dr_threshold);
            ctx.manifest.config = {{"platform", dr_platform}, {"threshold_ns", dr_threshold}};
            emit(ctx, drift_report_view(report), dr_o, "drift");
            return kAccept;
        }

        if (*record) {
            const auto constant = constant_flag(rec_cp_ns, rec_cp_us);
            if (!constant) {
                throw ConfigError("record needs --c-p-ns or --c-p-us");
            }
            const auto tag = make_tag(rec_platform, rec_session, rec_label, rec_captured);
            PlatformCalibration cal;
            cal.tag = tag;
            cal.c_p_ns = *constant;
            cal.n_trials = rec_n;
            cal.median_range_ns = {*constant, *constant};
            cal.tolerance_ns = rec_tol_ns.value_or(0.0);
            const nlohmann::json canonical = {{"platform", tag.platform.name()},
                                              {"session", tag.session_id},
                                              {"c_p_ns", cal.c_p_ns},
                                              {"n_trials", cal.n_trials},
                                              {"tolerance_ns", cal.tolerance_ns}};
            SessionEntry entry{tag, cal, rec_created.empty() ? utc_now_iso8601() : rec_created,
                               sha256_hex(canonical.dump())};
            const auto store_path = resolve_store(rec_o);
            std::string key;
            update_store(store_path, [&](CalibrationStore &s) { key = s.record_session(entry); });
            ctx.manifest.config = canonical;
            ctx.manifest.outputs.push_back(store_path.string());
            Report r;
            r.text = fmt::format("recorded {} C_p {} us (n={})\n", key, us2(cal.c_p_ns), cal.n_trials);
            r.csv = fmt::format("key,c_p_ns,n_trials\n{},{},{}\n", key, cal.c_p_ns, cal.n_trials);
            r.structured = {{"key", key}, {"c_p_ns", cal.c_p_ns}, {"n_trials", cal.n_trials}};
            emit(ctx, r, rec_o, "record");
            return kAccept;
        }

        if (*lookup) {
            const auto store_path = resolve_store(lk_o);
            note_input(ctx, store_path);
            const auto cal = CalibrationStore::load(store_path)
                                 .lookup_constant(PlatformId::parse(lk_platform), parse_lookup_policy(lk_policy));
            ctx.manifest.config = {{"platform", lk_platform}, {"policy", lk_policy}};
            Report r;
            r.text = fmt::format("{} ({}): C_p {} us over {} trials, tau {} us\n", lk_platform, lk_policy,
                                 us2(cal.c_p_ns), cal.n_trials, us2(cal.tolerance_ns));
            r.csv = fmt::format("platform,policy,c_p_ns,n_trials,tolerance_ns\n{},{},{},{},{}\n", lk_platform,
                                lk_policy, cal.c_p_ns, cal.n_trials, cal.tolerance_ns);
            r.structured = {{"platform", lk_platform},
                            {"policy", lk_policy},
                            {"c_p_ns", cal.c_p_ns},
                            {"n_trials", cal.n_trials},
                            {"tolerance_ns", cal.tolerance_ns}};
            emit(ctx, r, lk_o, "lookup");
            return kAccept;
        }

        if (*gcompare) {
            const auto opts = pipeline_options(gc_p);
            const auto jl = load_inputs(gj_in, ctx);
            const auto pl = load_inputs(gp_in, ctx);
            const auto jr = run_pipeline(jl.captures, jl.trials, opts);
            const auto pr = run_pipeline(pl.captures, pl.trials, opts);
            const auto jcal = platform_constant(jr.stats, make_tag("jetson", "", "", "-"), gc_p.k);
            const auto pcal = platform_constant(pr.stats, make_tag("pi", "", "", "-"), gc_p.k);
            const double tau = gc_p.tau_ns.value_or(std::max(jcal.tolerance_ns, pcal.tolerance_ns));
            const PlatformConstants constants{gc_cj.value_or(jcal.c_p_ns), gc_cpi.value_or(pcal.c_p_ns)};
            const auto cmp = gate_comparison(jr.series, pr.series, tau, constants, parse_gate_statistic(gc_stat));
            ctx.manifest.config = pipeline_json(gc_p);
            ctx.manifest.config["tau_ns"] = tau;
            ctx.manifest.config["jetson_c_p_ns"] = constants.jetson_ns;
            ctx.manifest.config["pi_c_p_ns"] = constants.pi_ns;
            emit(ctx, gate_comparison_report(cmp), gc_o, "gate-compare");
            return kAccept;
        }
    } catch (const AlignmentError &e) {
        err << "error: " << e.what() << '\n';
        return kAlignmentFail;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return kParseOrConfigError;
    } catch (const nlohmann::json::exception &e) {
        err << "error: " << e.what() << '\n';
        return kParseOrConfigError;
    } catch (const std::filesystem::filesystem_error &e) {
        err << "error: " << e.what() << '\n';
        return kParseOrConfigError;
    }
    return kParseOrConfigError;
}

}  // namespace pulsecal::cli

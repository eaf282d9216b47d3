// probekit: probe-request capture analysis pipeline.
//
// Subcommands read and write JSON-lines artifacts so stages compose:
//   synth -> (pcap|records) -> instances -> devices -> merge
// or run end to end with `analyze`. `verify` cross-checks an analyze
// output directory. Exit codes: 0 ok, 1 input/format error, 2 config
// error, 3 consistency failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "probekit/probekit.hpp"

namespace pk = probekit;

namespace {

pk::Capture load_capture(const std::string& path, const std::string& format) {
    std::optional<pk::CaptureFormat> fmt;
    if (format == "pcap") fmt = pk::CaptureFormat::Pcap;
    else if (format == "records") fmt = pk::CaptureFormat::Records;
    else if (format != "auto") throw pk::ConfigError("unknown format '" + format + "'");
    pk::Capture cap = pk::read_capture_file(path, fmt);
    if (!cap.warnings.empty()) {
        constexpr std::size_t kShow = 5;
        for (std::size_t i = 0; i < cap.warnings.size() && i < kShow; ++i)
            std::cerr << "warning: " << cap.warnings[i] << "\n";
        if (cap.warnings.size() > kShow)
            std::cerr << "warning: ... " << cap.warnings.size() - kShow << " more\n";
    }
    return cap;
}

pk::CaptureFormat out_format_for(const std::string& flag, const std::string& out_path) {
    if (flag == "pcap") return pk::CaptureFormat::Pcap;
    if (flag == "records") return pk::CaptureFormat::Records;
    if (flag != "auto") throw pk::ConfigError("unknown format '" + flag + "'");
    return out_path.ends_with(".pcap") ? pk::CaptureFormat::Pcap : pk::CaptureFormat::Records;
}

// "-" means stdout.
void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        if (!std::cout) throw pk::IoError("short write on stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pk::IoError("cannot open for writing: " + path);
    out << text;
    if (!out) throw pk::IoError("short write: " + path);
}

// "-" means stdin.
struct TextInput {
    std::ifstream file;
    std::istream& stream;
    explicit TextInput(const std::string& path)
        : file(path == "-" ? std::ifstream() : std::ifstream(path, std::ios::binary)),
          stream(path == "-" ? std::cin : file) {
        if (path != "-" && !file) throw pk::IoError("cannot open: " + path);
    }
};

pk::AnonymizationKey make_key(const std::string& salt_hex) {
    if (salt_hex.empty()) return pk::AnonymizationKey::random();
    return pk::AnonymizationKey::from_hex(salt_hex);
}

std::string jsonl_string(const std::vector<pk::ScanInstance>& instances) {
    std::ostringstream os;
    pk::write_instances_jsonl(os, instances);
    return os.str();
}

std::string jsonl_string(const std::vector<pk::DeviceCluster>& devices,
                         const std::vector<pk::ScanInstance>& instances) {
    std::ostringstream os;
    pk::write_devices_jsonl(os, devices, instances);
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"probe-request capture analysis"};
    app.require_subcommand(1);

    // anonymize
    auto* cmd_anon = app.add_subcommand("anonymize", "pseudonymize identity fields of a capture");
    struct {
        std::string in, out, format = "auto", out_format = "auto", salt_hex;
    } anon;
    cmd_anon->add_option("--in", anon.in, "input capture (pcap or records)")->required();
    cmd_anon->add_option("--out", anon.out, "output capture path")->required();
    cmd_anon->add_option("--format", anon.format, "input format: auto|pcap|records");
    cmd_anon->add_option("--out-format", anon.out_format, "output format: auto|pcap|records");
    cmd_anon->add_option("--salt-hex", anon.salt_hex,
                         "32 hex digits; omit for a random run-scoped salt");
    cmd_anon->callback([&] {
        pk::Capture cap = load_capture(anon.in, anon.format);
        auto records = pk::anonymize_capture(std::move(cap.records), make_key(anon.salt_hex));
        pk::write_capture_file(records, anon.out, out_format_for(anon.out_format, anon.out));
        std::cout << "anonymized " << records.size() << " probes -> " << anon.out << "\n";
    });

    // stats
    auto* cmd_stats = app.add_subcommand("stats", "information-element frequency table");
    struct {
        std::string in, format = "auto";
        bool csv = false;
    } stats;
    cmd_stats->add_option("--in", stats.in, "input capture")->required();
    cmd_stats->add_option("--format", stats.format, "input format: auto|pcap|records");
    cmd_stats->add_flag("--csv", stats.csv, "emit CSV instead of the text table");
    cmd_stats->callback([&] {
        pk::Capture cap = load_capture(stats.in, stats.format);
        std::vector<pk::ProbeRequest> probes;
        probes.reserve(cap.records.size());
        for (const auto& r : cap.records) probes.push_back(r.probe);
        const pk::IeStatistics st = pk::ie_statistics(probes);
        std::cout << (stats.csv ? pk::format_ie_statistics_csv(st)
                                : pk::format_ie_statistics_text(st));
    });

    // instances
    auto* cmd_inst = app.add_subcommand("instances", "group probes into scan instances");
    struct {
        std::string in, format = "auto", out = "-";
        double gap = 10.0;
        bool no_wraparound = false;
    } inst;
    cmd_inst->add_option("--in", inst.in, "input capture")->required();
    cmd_inst->add_option("--format", inst.format, "input format: auto|pcap|records");
    cmd_inst->add_option("--out", inst.out, "instance JSONL output ('-' = stdout)");
    cmd_inst->add_option("--gap", inst.gap, "max seconds between probes of one instance (0 = unbounded)");
    cmd_inst->add_flag("--no-wraparound", inst.no_wraparound,
                       "compare sequence numbers literally at the 4095 boundary");
    cmd_inst->callback([&] {
        pk::Capture cap = load_capture(inst.in, inst.format);
        pk::InstanceConfig cfg{inst.gap, !inst.no_wraparound};
        std::size_t group_excluded = 0;
        auto instances = pk::instances_from_capture(cap.records, cfg, &group_excluded);
        write_text(inst.out, jsonl_string(instances));
        std::cerr << instances.size() << " instances from "
                  << cap.records.size() - group_excluded << " probes";
        if (group_excluded) std::cerr << " (" << group_excluded << " group-addressed excluded)";
        std::cerr << "\n";
    });

    // devices
    auto* cmd_dev = app.add_subcommand("devices", "cluster scan instances into devices");
    struct {
        std::string in, out = "-", metric = "jaccard";
        double threshold = 0.5;
        bool inclusive = false;
    } dev;
    cmd_dev->add_option("--in", dev.in, "instance JSONL ('-' = stdin)")->required();
    cmd_dev->add_option("--out", dev.out, "device JSONL output ('-' = stdout)");
    cmd_dev->add_option("--metric", dev.metric, "SSID similarity: jaccard|overlap");
    cmd_dev->add_option("--threshold", dev.threshold, "similarity required to merge (default 0.5)");
    cmd_dev->add_flag("--inclusive", dev.inclusive, "merge at similarity >= threshold instead of >");
    cmd_dev->callback([&] {
        TextInput in(dev.in);
        auto instances = pk::read_instances_jsonl(in.stream);
        pk::SimilarityConfig cfg{pk::similarity_metric_from_string(dev.metric), dev.threshold,
                                 dev.inclusive ? pk::Comparator::Inclusive : pk::Comparator::Strict};
        auto devices = pk::cluster_devices(instances, cfg);
        write_text(dev.out, jsonl_string(devices, instances));
        std::cerr << devices.size() << " devices from " << instances.size() << " instances\n";
    });

    // merge
    auto* cmd_merge = app.add_subcommand("merge", "merge devices with matching temporal patterns");
    struct {
        std::string in, out = "-", scope = "randomized";
        double gap = 600.0, pad = 30.0, overlap = 0.5;
    } mrg;
    cmd_merge->add_option("--in", mrg.in, "device JSONL ('-' = stdin)")->required();
    cmd_merge->add_option("--out", mrg.out, "merged device JSONL ('-' = stdout)");
    cmd_merge->add_option("--gap", mrg.gap, "appearance-cluster gap seconds (default 600)");
    cmd_merge->add_option("--pad", mrg.pad, "cluster interval pad seconds (default 30)");
    cmd_merge->add_option("--overlap", mrg.overlap, "interval overlap threshold (default 0.5)");
    cmd_merge->add_option("--scope", mrg.scope, "candidates: randomized|all");
    cmd_merge->callback([&] {
        TextInput in(mrg.in);
        pk::DeviceArtifacts art = pk::read_devices_jsonl(in.stream);
        pk::TemporalConfig cfg{mrg.gap, mrg.pad, mrg.overlap,
                               pk::merge_scope_from_string(mrg.scope)};
        auto merged = pk::temporal_merge(art.devices, art.instances, cfg);
        write_text(mrg.out, jsonl_string(merged, art.instances));
        std::cerr << art.devices.size() << " devices -> " << merged.size() << " after merge\n";
    });

    // analyze
    auto* cmd_an = app.add_subcommand("analyze", "full pipeline with report and artifacts");
    struct {
        std::string in, format = "auto", out_dir, salt_hex;
        bool anonymize = false;
        double gap = 10.0, threshold = 0.5, mgap = 600.0, mpad = 30.0, moverlap = 0.5;
        bool no_wraparound = false, inclusive = false;
        std::string metric = "jaccard", scope = "randomized";
        std::string timeline_csv, timeline_svg, timeline_stage = "post";
        std::vector<std::size_t> timeline_devices;
    } an;
    cmd_an->add_option("--in", an.in, "input capture")->required();
    cmd_an->add_option("--format", an.format, "input format: auto|pcap|records");
    cmd_an->add_option("--out", an.out_dir,
                       "directory for report.json, instances.jsonl, devices_{pre,post}.jsonl");
    cmd_an->add_flag("--anonymize", an.anonymize, "pseudonymize identities before analysis");
    cmd_an->add_option("--salt-hex", an.salt_hex, "salt for --anonymize (default: random)");
    cmd_an->add_option("--gap", an.gap, "instance gap seconds");
    cmd_an->add_flag("--no-wraparound", an.no_wraparound, "literal sequence-number windows");
    cmd_an->add_option("--metric", an.metric, "SSID similarity: jaccard|overlap");
    cmd_an->add_option("--threshold", an.threshold, "SSID similarity threshold");
    cmd_an->add_flag("--inclusive", an.inclusive, "similarity comparator >= instead of >");
    cmd_an->add_option("--merge-gap", an.mgap, "appearance-cluster gap seconds");
    cmd_an->add_option("--merge-pad", an.mpad, "appearance interval pad seconds");
    cmd_an->add_option("--merge-overlap", an.moverlap, "temporal overlap threshold");
    cmd_an->add_option("--merge-scope", an.scope, "merge candidates: randomized|all");
    cmd_an->add_option("--timeline-csv", an.timeline_csv, "write timeline CSV here");
    cmd_an->add_option("--timeline-svg", an.timeline_svg, "write timeline SVG here");
    cmd_an->add_option("--timeline-stage", an.timeline_stage, "timeline source: pre|post");
    cmd_an->add_option("--timeline-devices", an.timeline_devices, "device ids to render")
        ->delimiter(',');
    cmd_an->callback([&] {
        if (!an.salt_hex.empty() && !an.anonymize)
            throw pk::ConfigError("--salt-hex requires --anonymize");
        pk::Capture cap = load_capture(an.in, an.format);
        pk::AnalysisConfig cfg;
        if (an.anonymize) cfg.anonymize_key = make_key(an.salt_hex);
        cfg.instance = {an.gap, !an.no_wraparound};
        cfg.similarity = {pk::similarity_metric_from_string(an.metric), an.threshold,
                          an.inclusive ? pk::Comparator::Inclusive : pk::Comparator::Strict};
        cfg.temporal = {an.mgap, an.mpad, an.moverlap, pk::merge_scope_from_string(an.scope)};
        const pk::AnalysisResult res = pk::analyze(cap, cfg);
        const pk::AnalysisReport& rep = res.report;

        std::printf("probes                %zu\n", rep.probe_count);
        if (rep.group_probes_excluded)
            std::printf("  group excluded      %zu\n", rep.group_probes_excluded);
        std::printf("scan instances        %zu\n", rep.instance_count);
        std::printf("devices pre-merge     %zu\n", rep.device_count_pre_merge);
        std::printf("  global MAC          %zu\n", rep.global_mac_devices);
        std::printf("  randomized          %zu\n", rep.randomized_devices_pre);
        std::printf("devices post-merge    %zu\n", rep.device_count_post_merge);

        if (!an.out_dir.empty()) {
            std::filesystem::create_directories(an.out_dir);
            const auto base = std::filesystem::path(an.out_dir);
            write_text((base / "report.json").string(), pk::report_to_json(rep).dump(2) + "\n");
            write_text((base / "instances.jsonl").string(), jsonl_string(res.instances));
            write_text((base / "devices_pre.jsonl").string(),
                       jsonl_string(res.devices_pre, res.instances));
            write_text((base / "devices_post.jsonl").string(),
                       jsonl_string(res.devices_post, res.instances));
        }

        if (!an.timeline_csv.empty() || !an.timeline_svg.empty()) {
            if (an.timeline_stage != "pre" && an.timeline_stage != "post")
                throw pk::ConfigError("--timeline-stage must be pre or post");
            const auto& lanes =
                an.timeline_stage == "pre" ? rep.timelines_pre : rep.timelines_post;
            if (!an.timeline_csv.empty())
                write_text(an.timeline_csv, pk::render_timeline_csv(lanes, an.timeline_devices));
            if (!an.timeline_svg.empty())
                write_text(an.timeline_svg, pk::render_timeline_svg(lanes, an.timeline_devices));
        }
    });

    // synth
    auto* cmd_synth = app.add_subcommand("synth", "generate a labeled synthetic capture");
    struct {
        std::string scenario, out, format = "auto", truth;
        std::optional<std::uint64_t> seed;
    } syn;
    cmd_synth->add_option("--scenario", syn.scenario, "scenario JSON file")->required();
    cmd_synth->add_option("--out", syn.out, "output capture path")->required();
    cmd_synth->add_option("--format", syn.format, "output format: auto|pcap|records");
    cmd_synth->add_option("--seed", syn.seed, "override the scenario seed");
    cmd_synth->add_option("--truth", syn.truth, "ground-truth sidecar path (default: <out>.truth)");
    cmd_synth->callback([&] {
        pk::Scenario sc = pk::scenario_from_file(syn.scenario);
        if (syn.seed) sc.seed = *syn.seed;
        const pk::SynthResult res = pk::generate(sc);
        pk::write_capture_file(res.records, syn.out, out_format_for(syn.format, syn.out));
        const std::string truth_path = syn.truth.empty() ? syn.out + ".truth" : syn.truth;
        std::ofstream truth_out(truth_path, std::ios::binary);
        if (!truth_out) throw pk::IoError("cannot open for writing: " + truth_path);
        pk::write_ground_truth(truth_out, sc.seed, res.truth);
        std::cout << "generated " << res.records.size() << " probes from " << sc.devices.size()
                  << " devices (seed " << sc.seed << ") -> " << syn.out << "\n"
                  << "ground truth -> " << truth_path << "\n";
    });

    // verify
    auto* cmd_verify = app.add_subcommand("verify", "cross-check an analyze output directory");
    struct {
        std::string dir;
    } ver;
    cmd_verify->add_option("--dir", ver.dir, "analyze --out directory")->required();
    cmd_verify->callback([&] {
        const auto base = std::filesystem::path(ver.dir);
        pk::ArtifactSet art;
        {
            std::ifstream in(base / "report.json", std::ios::binary);
            if (!in) throw pk::IoError("cannot open: " + (base / "report.json").string());
            try {
                art.report = pk::Json::parse(in);
            } catch (const pk::Json::parse_error& e) {
                throw pk::FormatError(std::string("report.json: ") + e.what());
            }
        }
        {
            TextInput in((base / "instances.jsonl").string());
            art.instances = pk::read_instances_jsonl(in.stream);
        }
        {
            TextInput in((base / "devices_pre.jsonl").string());
            art.devices_pre = pk::read_devices_jsonl(in.stream);
        }
        {
            TextInput in((base / "devices_post.jsonl").string());
            art.devices_post = pk::read_devices_jsonl(in.stream);
        }
        pk::verify_artifacts(art);
        std::cout << "ok: " << art.instances.size() << " instances, "
                  << art.devices_pre.devices.size() << " -> " << art.devices_post.devices.size()
                  << " devices consistent with report.json\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const pk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const pk::ConsistencyError& e) {
        std::cerr << "consistency error: " << e.what() << "\n";
        return 3;
    } catch (const pk::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 1;
    } catch (const pk::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

// uascan — security assessment scanner for OPC UA deployments.
//
//   uascan scan --targets hosts.txt --blocklist nets.txt --out results/
//   uascan diff --old monday.jsonl --new friday.jsonl
//   uascan report --snapshot results/snapshot.jsonl [--anonymize]
//   uascan mockserver --config fixture.json
//
// scan probes every target once under a per-host budget, diff compares two
// snapshots of the same fleet, report renders aggregate tables or exports an
// anonymized dataset, and mockserver runs a fixture for manual testing.

#include <atomic>
#include <cctype>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "uascan/assess/aggregate.hpp"
#include "uascan/mock/mock_server.hpp"
#include "uascan/orchestrate/blocklist.hpp"
#include "uascan/orchestrate/campaign.hpp"
#include "uascan/orchestrate/diff.hpp"
#include "uascan/report/anonymize.hpp"
#include "uascan/report/render.hpp"

namespace {

using namespace uascan;

// ---------------------------------------------------------------------------
// Value parsing: durations as "500ms" / "5s" / "10m" / "1h" (bare numbers are
// seconds), sizes as "100KB" / "50MB" / "1GB" (bare numbers are bytes,
// 1024-based units).
// ---------------------------------------------------------------------------

int64_t parse_duration_ms(const std::string& text) {
    size_t pos = 0;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) != 0))
        ++pos;
    if (pos == 0) throw CLI::ValidationError("duration", "expected a number: " + text);
    const int64_t value = std::stoll(text.substr(0, pos));
    const std::string unit = text.substr(pos);
    if (unit == "ms") return value;
    if (unit.empty() || unit == "s") return value * 1000;
    if (unit == "m") return value * 60 * 1000;
    if (unit == "h") return value * 3600 * 1000;
    throw CLI::ValidationError("duration", "unknown unit '" + unit + "' (ms/s/m/h)");
}

uint64_t parse_size_bytes(const std::string& text) {
    size_t pos = 0;
    while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) != 0))
        ++pos;
    if (pos == 0) throw CLI::ValidationError("size", "expected a number: " + text);
    const uint64_t value = std::stoull(text.substr(0, pos));
    std::string unit = text.substr(pos);
    for (auto& c : unit) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (unit.empty() || unit == "B") return value;
    if (unit == "KB") return value << 10;
    if (unit == "MB") return value << 20;
    if (unit == "GB") return value << 30;
    throw CLI::ValidationError("size", "unknown unit '" + unit + "' (B/KB/MB/GB)");
}

// ---------------------------------------------------------------------------
// Input files
// ---------------------------------------------------------------------------

/// One `host[:port]` per line; blank lines and #-comments skipped.
std::vector<net::Target> load_targets(const std::string& path, uint16_t default_port) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot open targets file: " + path);
    std::vector<net::Target> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto end = line.find_last_not_of(" \t\r"); end != std::string::npos)
            line.erase(end + 1);
        else
            line.clear();
        if (line.empty() || line[0] == '#') continue;
        auto t = net::parse_target(line, default_port);
        if (!t)
            throw Error(errc::invalid_config,
                        path + ":" + std::to_string(lineno) + ": bad target: " + line);
        out.push_back(*t);
    }
    return out;
}

/// `host:port<TAB>AS label` per line, keyed the way assessments look it up.
std::map<std::string, std::string> load_as_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot open AS label file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        auto where = path + ":" + std::to_string(lineno);
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
            throw Error(errc::malformed_rule_file, where + ": expected target<TAB>label");
        auto t = net::parse_target(line.substr(0, tab));
        if (!t) throw Error(errc::malformed_rule_file, where + ": bad target");
        out[t->to_string()] = line.substr(tab + 1);
    }
    return out;
}

/// Loads a rule file, skipping a missing default path but failing loudly on
/// a path the user asked for.
assess::RuleSet load_rules_maybe(const std::string& path, bool user_supplied) {
    if (!user_supplied && !std::filesystem::exists(path)) return {};
    return assess::load_rules(path);
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

struct ScanArgs {
    std::string targets_file;
    std::string blocklist_file;
    std::string out_dir;
    uint16_t port = net::kDefaultPort;
    int64_t delay_ms = 500;
    std::string time_limit = "3600s";
    std::string byte_limit = "50MB";
    unsigned concurrency = 16;
    bool follow_referrals = false;
    std::string snapshot_id;
    std::string manufacturer_rules = UASCAN_DATA_DIR "/manufacturer_rules.tsv";
    std::string production_rules = UASCAN_DATA_DIR "/namespace_production.tsv";
    std::string test_rules = UASCAN_DATA_DIR "/namespace_test.tsv";
    std::string as_labels_file;
};

int run_scan(const ScanArgs& args, const CLI::App& cmd) {
    orchestrate::CampaignOptions opts;
    opts.probe.budget.inter_request_delay = std::chrono::milliseconds(args.delay_ms);
    opts.probe.budget.max_duration_per_host =
        std::chrono::milliseconds(parse_duration_ms(args.time_limit));
    opts.probe.budget.max_bytes_per_host = parse_size_bytes(args.byte_limit);
    opts.probe.budget.global_concurrency = args.concurrency;
    // one self-signed instance certificate for the whole campaign, so
    // secured endpoints can be probed past the channel handshake
    opts.probe.client_certificate = client::make_client_certificate(opts.probe);
    opts.follow_referrals = args.follow_referrals;
    opts.snapshot_id = args.snapshot_id.empty() ? orchestrate::detail::default_snapshot_id()
                                                : args.snapshot_id;

    opts.context.manufacturer_rules =
        load_rules_maybe(args.manufacturer_rules, cmd.count("--manufacturer-rules") > 0);
    opts.context.production_rules =
        load_rules_maybe(args.production_rules, cmd.count("--production-rules") > 0);
    opts.context.test_rules = load_rules_maybe(args.test_rules, cmd.count("--test-rules") > 0);
    if (!args.as_labels_file.empty())
        opts.context.as_labels = load_as_labels(args.as_labels_file);

    auto targets = load_targets(args.targets_file, args.port);
    auto blocklist = orchestrate::Blocklist::load(args.blocklist_file);

    std::filesystem::create_directories(args.out_dir);
    const auto snapshot_path = std::filesystem::path(args.out_dir) / "snapshot.jsonl";
    report::SnapshotWriter writer(snapshot_path.string(), opts.snapshot_id);

    auto result = orchestrate::run_campaign(targets, blocklist, opts, &writer);

    std::vector<assess::HostAssessment> assessments;
    assessments.reserve(result.snapshot.records.size());
    size_t with_findings = 0;
    for (const auto& r : result.snapshot.records) {
        if (!r.assessment.findings.empty()) ++with_findings;
        assessments.push_back(r.assessment);
    }
    const auto report_path = std::filesystem::path(args.out_dir) / "report.txt";
    std::ofstream report_out(report_path);
    report_out << report::render_fleet_report(assess::aggregate_fleet(assessments),
                                              report::ReportFormat::Text);

    std::cout << "targets:      " << targets.size() << "\n"
              << "blocklisted:  " << result.blocklisted.size() << "\n"
              << "referrals:    " << result.referrals.size() << "\n"
              << "probed:       " << result.snapshot.records.size() << "\n"
              << "with findings " << with_findings << "\n"
              << "snapshot:     " << snapshot_path.string() << "\n"
              << "report:       " << report_path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// diff
// ---------------------------------------------------------------------------

int run_diff(const std::string& old_path, const std::string& new_path,
             const std::string& identities_path) {
    std::map<std::string, std::string> overrides;
    if (!identities_path.empty()) {
        std::ifstream in(identities_path);
        if (!in) throw Error(errc::io_error, "cannot open identity file: " + identities_path);
        overrides = orchestrate::load_identity_overrides(in);
    }
    auto diff = orchestrate::diff_snapshots(report::read_snapshot(old_path),
                                            report::read_snapshot(new_path), overrides);
    std::cout << orchestrate::render_diff(diff);
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

int run_report(const std::string& snapshot_path, bool anonymize,
               const std::string& map_path, const std::string& format_name,
               const std::string& out_path) {
    auto snap = report::read_snapshot(snapshot_path);

    std::ofstream file_out;
    if (!out_path.empty()) {
        file_out.open(out_path, std::ios::trunc);
        if (!file_out) throw Error(errc::io_error, "cannot write " + out_path);
    }
    std::ostream& out = out_path.empty() ? std::cout : file_out;

    if (anonymize) {
        // Dataset export: the snapshot itself, with addresses replaced and
        // certificates blackened. The mapping file makes reruns stable.
        report::AnonymizationMap map;
        if (!map_path.empty() && std::filesystem::exists(map_path))
            map = report::AnonymizationMap::load(map_path);
        auto anon = report::anonymize(snap, map);
        if (!map_path.empty()) map.save(map_path);
        report::write_snapshot(anon, out);
        return 0;
    }

    std::vector<assess::HostAssessment> assessments;
    assessments.reserve(snap.records.size());
    for (const auto& r : snap.records) assessments.push_back(r.assessment);
    out << report::render_fleet_report(assess::aggregate_fleet(assessments),
                                       report::report_format_from_name(format_name));
    return 0;
}

// ---------------------------------------------------------------------------
// mockserver
// ---------------------------------------------------------------------------

std::atomic<bool> g_stop{false};

int run_mockserver(const std::string& config_path, const std::string& host, uint16_t port) {
    auto cfg = mock::load_config(config_path);
    mock::MockServer server(cfg, host, port);
    std::cout << "listening on " << server.url() << "\n"
              << "endpoints: " << server.endpoints().size() << ", nodes: "
              << cfg.nodes.size() + mock::skeleton::kNodeCount << "\n"
              << "press Ctrl-C to stop\n"
              << std::flush;
    std::signal(SIGINT, [](int) { g_stop = true; });
    std::signal(SIGTERM, [](int) { g_stop = true; });
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
    std::cout << "shutting down after " << server.log().size() << " service calls\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"uascan — OPC UA security assessment scanner"};
    app.require_subcommand(1);

    // --- scan ---------------------------------------------------------------
    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "probe a target list and write a snapshot");
    scan->add_option("--targets", scan_args.targets_file, "file with one host[:port] per line")
        ->required()
        ->check(CLI::ExistingFile);
    scan->add_option("--blocklist", scan_args.blocklist_file,
                     "file with one CIDR/host per line; matching targets are never contacted")
        ->required()
        ->check(CLI::ExistingFile);
    scan->add_option("--out", scan_args.out_dir, "output directory")->required();
    scan->add_option("--port", scan_args.port, "default port for targets without one")
        ->capture_default_str();
    scan->add_option("--delay-ms", scan_args.delay_ms,
                     "pause between requests to the same host")
        ->capture_default_str();
    scan->add_option("--host-time-limit", scan_args.time_limit,
                     "per-host wall-clock budget (ms/s/m/h)")
        ->capture_default_str();
    scan->add_option("--host-byte-limit", scan_args.byte_limit,
                     "per-host traffic budget (B/KB/MB/GB)")
        ->capture_default_str();
    scan->add_option("--concurrency", scan_args.concurrency,
                     "number of hosts probed in parallel")
        ->capture_default_str();
    scan->add_flag("--follow-referrals", scan_args.follow_referrals,
                   "also probe hosts advertised by discovery servers");
    scan->add_option("--snapshot-id", scan_args.snapshot_id,
                     "identifier stored in the snapshot (default: scan-<unix time>)");
    scan->add_option("--manufacturer-rules", scan_args.manufacturer_rules,
                     "ApplicationUri pattern<TAB>label file")
        ->capture_default_str();
    scan->add_option("--production-rules", scan_args.production_rules,
                     "namespace pattern<TAB>label file marking production systems")
        ->capture_default_str();
    scan->add_option("--test-rules", scan_args.test_rules,
                     "namespace pattern<TAB>label file marking test systems")
        ->capture_default_str();
    scan->add_option("--as-labels", scan_args.as_labels_file,
                     "host:port<TAB>autonomous-system label file");

    // --- diff ---------------------------------------------------------------
    std::string old_path, new_path, identities_path;
    auto* diff = app.add_subcommand("diff", "compare two snapshots of the same fleet");
    diff->add_option("--old", old_path, "earlier snapshot")->required()->check(CLI::ExistingFile);
    diff->add_option("--new", new_path, "later snapshot")->required()->check(CLI::ExistingFile);
    diff->add_option("--identities", identities_path,
                     "host:port<TAB>identity file pairing hosts across address changes")
        ->check(CLI::ExistingFile);

    // --- report -------------------------------------------------------------
    std::string snapshot_path, map_path, format_name = "text", report_out;
    bool anonymize = false;
    auto* report_cmd = app.add_subcommand("report", "render fleet tables or export a dataset");
    report_cmd->add_option("--snapshot", snapshot_path, "snapshot to read")
        ->required()
        ->check(CLI::ExistingFile);
    auto* anon_flag = report_cmd->add_flag(
        "--anonymize", anonymize,
        "emit the snapshot itself with addresses replaced by consecutive numbers");
    report_cmd
        ->add_option("--map", map_path,
                     "anonymization mapping file, loaded if present and updated after use")
        ->needs(anon_flag);
    report_cmd->add_option("--format", format_name, "table format: text, csv, or jsonl")
        ->capture_default_str()
        ->excludes(anon_flag);
    report_cmd->add_option("--out", report_out, "write output here instead of stdout");

    // --- mockserver ---------------------------------------------------------
    std::string config_path, mock_host = "127.0.0.1";
    uint16_t mock_port = net::kDefaultPort;
    auto* mockserver = app.add_subcommand("mockserver", "run a fixture server for testing");
    mockserver->add_option("--config", config_path, "fixture config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    mockserver->add_option("--host", mock_host, "listen address")->capture_default_str();
    mockserver->add_option("--port", mock_port, "listen port (0 picks a free one)")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (scan->parsed()) return run_scan(scan_args, *scan);
        if (diff->parsed()) return run_diff(old_path, new_path, identities_path);
        if (report_cmd->parsed())
            return run_report(snapshot_path, anonymize, map_path, format_name, report_out);
        if (mockserver->parsed()) return run_mockserver(config_path, mock_host, mock_port);
    } catch (const Error& e) {
        std::cerr << "uascan: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "uascan: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#pragma once

#include <algorithm>
#include <chrono>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "uascan/assess/assessment.hpp"
#include "uascan/cert/reuse.hpp"
#include "uascan/client/probe.hpp"
#include "uascan/net/url.hpp"
#include "uascan/orchestrate/blocklist.hpp"
#include "uascan/report/json_io.hpp"

namespace uascan::orchestrate {

struct CampaignOptions {
    client::ProbeOptions probe;
    assess::AssessContext context;
    bool follow_referrals = false;
    std::string snapshot_id;  // empty: derived from the wall clock
};

struct CampaignResult {
    report::Snapshot snapshot;
    std::vector<net::Target> blocklisted;  // dropped before any connection
    std::vector<net::Target> referrals;    // added via discovery endpoints
};

// ---------------------------------------------------------------------------
// Campaign
//
// Two phases. Phase one probes every admitted target, in waves when
// referral-following adds new ones; workers pull from a shared queue with at
// most budget.global_concurrency in flight, and requests to any single
// target stay strictly serial because each target is owned by one worker.
// Phase two needs the whole fleet at once: certificate reuse clusters feed
// the per-host assessments, and each (probe, assessment) pair becomes one
// snapshot record, streamed out as soon as it exists.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string default_snapshot_id() {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    return "scan-" +
           std::to_string(std::chrono::duration_cast<std::chrono::seconds>(now).count());
}

inline std::vector<client::ProbeResult> probe_wave(const std::vector<net::Target>& wave,
                                                   const CampaignOptions& options) {
    std::vector<client::ProbeResult> results(wave.size());
    const size_t workers =
        std::max<size_t>(1, std::min<size_t>(options.probe.budget.global_concurrency, wave.size()));
    std::mutex mu;
    size_t next = 0;
    auto worker = [&] {
        for (;;) {
            size_t i;
            {
                std::lock_guard lock(mu);
                if (next >= wave.size()) return;
                i = next++;
            }
            results[i] = client::probe_host(wave[i], options.probe);
        }
    };
    std::vector<std::thread> pool;
    for (size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

/// Endpoint URLs naming another host/port are referral candidates.
inline std::vector<net::Target> extract_referrals(const client::ProbeResult& probe) {
    std::vector<net::Target> out;
    for (const auto& ep : probe.endpoints) {
        auto parsed = net::parse_opc_url(ep.endpoint_url.str());
        if (!parsed) continue;
        if (parsed->host == probe.target.host && parsed->port == probe.target.port) continue;
        out.push_back(*parsed);
    }
    return out;
}

}  // namespace detail

inline CampaignResult run_campaign(const std::vector<net::Target>& targets,
                                   const Blocklist& blocklist, CampaignOptions options,
                                   report::SnapshotWriter* stream = nullptr) {
    if (!options.probe.budget.valid())
        throw Error(errc::invalid_config, "scan budget fields must all be positive");
    if (options.snapshot_id.empty()) options.snapshot_id = detail::default_snapshot_id();

    CampaignResult result;
    result.snapshot.snapshot_id = options.snapshot_id;

    // Admission: dedupe (first occurrence wins) and drop blocklisted targets
    // before anything touches the network.
    std::set<std::string> seen;
    std::vector<net::Target> wave;
    for (const auto& t : targets) {
        if (!seen.insert(t.to_string()).second) continue;
        if (blocklist.blocked(t.host)) {
            result.blocklisted.push_back(t);
            continue;
        }
        wave.push_back(t);
    }

    // Phase one: probe, then chase referrals until no admissible target is
    // new. Every target is probed exactly once no matter how many referrals
    // name it.
    std::vector<client::ProbeResult> probes;
    while (!wave.empty()) {
        auto batch = detail::probe_wave(wave, options);
        std::vector<net::Target> next_wave;
        if (options.follow_referrals) {
            for (const auto& probe : batch)
                for (const auto& ref : detail::extract_referrals(probe)) {
                    if (!seen.insert(ref.to_string()).second) continue;
                    if (blocklist.blocked(ref.host)) {
                        result.blocklisted.push_back(ref);
                        continue;
                    }
                    next_wave.push_back(ref);
                    result.referrals.push_back(ref);
                }
        }
        probes.insert(probes.end(), std::make_move_iterator(batch.begin()),
                      std::make_move_iterator(batch.end()));
        wave = std::move(next_wave);
    }

    // Phase two: reuse clusters need every certificate, so they are computed
    // over the full fleet before any host is assessed.
    std::vector<cert::ReuseObservation> observations;
    for (const auto& probe : probes) {
        if (!probe.server_certificate || probe.server_certificate->empty()) continue;
        cert::ReuseObservation o;
        o.target = probe.target.to_string();
        try {
            auto rec = cert::parse_certificate(*probe.server_certificate);
            o.fingerprint = rec.fingerprint;
            o.subject = rec.subject;
        } catch (const CertError&) {
            continue;
        }
        if (auto it = options.context.as_labels.find(o.target);
            it != options.context.as_labels.end())
            o.as_label = it->second;
        observations.push_back(std::move(o));
    }
    options.context.reuse_clusters = cert::cluster_reuse(observations);

    std::sort(probes.begin(), probes.end(),
              [](const client::ProbeResult& a, const client::ProbeResult& b) {
                  return std::pair(a.target.host, a.target.port) <
                         std::pair(b.target.host, b.target.port);
              });
    for (auto& probe : probes) {
        auto assessment = assess::assess_host(probe, options.context);
        auto record = report::make_record(std::move(probe), std::move(assessment));
        if (stream) stream->append(record);
        result.snapshot.records.push_back(std::move(record));
    }
    return result;
}

}  // namespace uascan::orchestrate

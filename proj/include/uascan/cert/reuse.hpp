#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace uascan::cert {

/// One sighting of a certificate on a target. AS labels are optional
/// enrichment supplied by the caller; empty means unknown.
struct ReuseObservation {
    std::string target;
    std::string fingerprint;
    std::string subject;
    std::string as_label;
};

/// Hosts presenting the same certificate. A cluster exists at two hosts;
/// it only counts as confirmed reuse at three, so that a single device
/// seen under a changed address does not register as reuse.
constexpr size_t kReuseConfirmThreshold = 3;

struct ReuseCluster {
    std::string fingerprint;
    std::set<std::string> hosts;
    std::set<std::string> autonomous_systems;
    std::string subject;

    bool confirmed() const { return hosts.size() >= kReuseConfirmThreshold; }
    bool operator==(const ReuseCluster&) const = default;
};

/// Groups observations by fingerprint, emitting every fingerprint shared by
/// at least two distinct targets. Output ordered by fingerprint.
inline std::vector<ReuseCluster> cluster_reuse(const std::vector<ReuseObservation>& obs) {
    std::map<std::string, ReuseCluster> by_fp;
    for (const auto& o : obs) {
        ReuseCluster& c = by_fp[o.fingerprint];
        c.fingerprint = o.fingerprint;
        c.hosts.insert(o.target);
        if (!o.as_label.empty()) c.autonomous_systems.insert(o.as_label);
        if (c.subject.empty()) c.subject = o.subject;
    }
    std::vector<ReuseCluster> out;
    for (auto& [fp, cluster] : by_fp)
        if (cluster.hosts.size() >= 2) out.push_back(std::move(cluster));
    return out;
}

}  // namespace uascan::cert

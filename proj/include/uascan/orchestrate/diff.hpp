#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "uascan/errors.hpp"
#include "uascan/policy.hpp"
#include "uascan/report/json_io.hpp"

namespace uascan::orchestrate {

// ---------------------------------------------------------------------------
// Snapshot diffing
//
// Records pair up by identity: host:port by default, overridable per target
// from a two-column file for installations known to move between addresses.
// Every event names the identity it belongs to.
// ---------------------------------------------------------------------------

enum class HashChange { Upgrade, Downgrade, Same };

inline const char* to_string(HashChange h) {
    switch (h) {
    case HashChange::Upgrade: return "Upgrade";
    case HashChange::Downgrade: return "Downgrade";
    case HashChange::Same: return "Same";
    }
    return "?";
}

struct CertificateRenewed {
    std::string identity;
    std::string old_fingerprint;
    std::string new_fingerprint;
    HashChange hash_change = HashChange::Same;
    bool with_software_update = false;  // a SoftwareVersionChanged co-occurred

    bool operator==(const CertificateRenewed&) const = default;
};

struct SoftwareVersionChanged {
    std::string identity;
    std::string old_version;
    std::string new_version;

    bool operator==(const SoftwareVersionChanged&) const = default;
};

struct FindingsChanged {
    std::string identity;
    std::vector<assess::DeficitKind> added;    // sorted
    std::vector<assess::DeficitKind> removed;  // sorted

    bool operator==(const FindingsChanged&) const = default;
};

struct SnapshotDiff {
    std::vector<std::string> new_hosts;       // identities only in the new snapshot
    std::vector<std::string> vanished_hosts;  // identities only in the old one
    std::vector<CertificateRenewed> certificate_renewals;
    std::vector<SoftwareVersionChanged> software_changes;
    std::vector<FindingsChanged> findings_changes;

    bool empty() const {
        return new_hosts.empty() && vanished_hosts.empty() && certificate_renewals.empty() &&
               software_changes.empty() && findings_changes.empty();
    }
    bool operator==(const SnapshotDiff&) const = default;
};

/// Two-column file: `target<TAB>identity`. Targets not listed keep their
/// host:port identity.
inline std::map<std::string, std::string> load_identity_overrides(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
            throw Error(errc::malformed_rule_file,
                        "identity line " + std::to_string(line_no) + " is not target\\tidentity");
        out[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return out;
}

inline std::map<std::string, std::string> load_identity_overrides(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot read " + path);
    return load_identity_overrides(in);
}

namespace detail {

inline std::map<std::string, const report::SnapshotRecord*> index_by_identity(
    const report::Snapshot& snap, const std::map<std::string, std::string>& overrides) {
    std::map<std::string, const report::SnapshotRecord*> out;
    for (const auto& r : snap.records) {
        std::string identity = r.probe.target.to_string();
        if (auto it = overrides.find(identity); it != overrides.end()) identity = it->second;
        out.emplace(std::move(identity), &r);
    }
    return out;
}

inline std::vector<assess::DeficitKind> finding_kinds(const assess::HostAssessment& a) {
    std::vector<assess::DeficitKind> kinds;
    for (const auto& f : a.findings) kinds.push_back(f.kind);
    std::sort(kinds.begin(), kinds.end());
    return kinds;
}

}  // namespace detail

inline SnapshotDiff diff_snapshots(const report::Snapshot& old_snap,
                                   const report::Snapshot& new_snap,
                                   const std::map<std::string, std::string>& overrides = {}) {
    SnapshotDiff diff;
    const auto old_index = detail::index_by_identity(old_snap, overrides);
    const auto new_index = detail::index_by_identity(new_snap, overrides);

    for (const auto& [identity, rec] : new_index)
        if (!old_index.count(identity)) diff.new_hosts.push_back(identity);
    for (const auto& [identity, rec] : old_index)
        if (!new_index.count(identity)) diff.vanished_hosts.push_back(identity);

    for (const auto& [identity, old_rec] : old_index) {
        auto it = new_index.find(identity);
        if (it == new_index.end()) continue;
        const report::SnapshotRecord& new_rec = *it->second;

        bool version_changed = false;
        const auto& old_ver = old_rec->probe.software_version;
        const auto& new_ver = new_rec.probe.software_version;
        if (old_ver && new_ver && *old_ver != *new_ver) {
            diff.software_changes.push_back({identity, *old_ver, *new_ver});
            version_changed = true;
        }

        if (old_rec->certificate && new_rec.certificate &&
            old_rec->certificate->fingerprint != new_rec.certificate->fingerprint) {
            CertificateRenewed ev;
            ev.identity = identity;
            ev.old_fingerprint = old_rec->certificate->fingerprint;
            ev.new_fingerprint = new_rec.certificate->fingerprint;
            const int old_rank = hash_rank(old_rec->certificate->signature_hash);
            const int new_rank = hash_rank(new_rec.certificate->signature_hash);
            ev.hash_change = new_rank < old_rank   ? HashChange::Downgrade
                             : new_rank > old_rank ? HashChange::Upgrade
                                                   : HashChange::Same;
            ev.with_software_update = version_changed;
            diff.certificate_renewals.push_back(std::move(ev));
        }

        auto old_kinds = detail::finding_kinds(old_rec->assessment);
        auto new_kinds = detail::finding_kinds(new_rec.assessment);
        if (old_kinds != new_kinds) {
            FindingsChanged ev;
            ev.identity = identity;
            std::set_difference(new_kinds.begin(), new_kinds.end(), old_kinds.begin(),
                                old_kinds.end(), std::back_inserter(ev.added));
            std::set_difference(old_kinds.begin(), old_kinds.end(), new_kinds.begin(),
                                new_kinds.end(), std::back_inserter(ev.removed));
            diff.findings_changes.push_back(std::move(ev));
        }
    }
    return diff;
}

/// One line per event, for the diff subcommand.
inline std::string render_diff(const SnapshotDiff& diff) {
    std::ostringstream out;
    for (const auto& h : diff.new_hosts) out << "new-host\t" << h << '\n';
    for (const auto& h : diff.vanished_hosts) out << "vanished-host\t" << h << '\n';
    for (const auto& e : diff.certificate_renewals)
        out << "certificate-renewed\t" << e.identity << '\t' << e.old_fingerprint << " -> "
            << e.new_fingerprint << "\thash:" << to_string(e.hash_change)
            << (e.with_software_update ? "\twith-software-update" : "") << '\n';
    for (const auto& e : diff.software_changes)
        out << "software-version\t" << e.identity << '\t' << e.old_version << " -> "
            << e.new_version << '\n';
    for (const auto& e : diff.findings_changes) {
        out << "findings-changed\t" << e.identity << '\t';
        bool first = true;
        for (auto k : e.added) {
            out << (first ? "" : " ") << "+" << assess::to_string(k);
            first = false;
        }
        for (auto k : e.removed) {
            out << (first ? "" : " ") << "-" << assess::to_string(k);
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace uascan::orchestrate

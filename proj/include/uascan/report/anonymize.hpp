#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "uascan/errors.hpp"
#include "uascan/report/json_io.hpp"

namespace uascan::report {

// ---------------------------------------------------------------------------
// AnonymizationMap
//
// Hosts and AS labels get consecutive numbers, assigned in first-seen order.
// The mapping is salt-free and persistable, so re-running against the same
// map file reproduces the exact same output.
// ---------------------------------------------------------------------------

struct AnonymizationMap {
    std::map<std::string, int> hosts;
    std::map<std::string, int> as_labels;

    int host_number(const std::string& raw) {
        auto it = hosts.find(raw);
        if (it != hosts.end()) return it->second;
        return hosts.emplace(raw, next_number(hosts)).first->second;
    }
    int as_number(const std::string& raw) {
        auto it = as_labels.find(raw);
        if (it != as_labels.end()) return it->second;
        return as_labels.emplace(raw, next_number(as_labels)).first->second;
    }

    std::string host_token(const std::string& raw) {
        return "host-" + std::to_string(host_number(raw));
    }
    std::string as_token(const std::string& raw) {
        return "AS-" + std::to_string(as_number(raw));
    }

    /// Lines of `h<TAB>raw<TAB>number` and `a<TAB>raw<TAB>number`.
    void save(std::ostream& out) const {
        for (const auto& [raw, n] : hosts) out << "h\t" << raw << '\t' << n << '\n';
        for (const auto& [raw, n] : as_labels) out << "a\t" << raw << '\t' << n << '\n';
    }
    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw Error(errc::io_error, "cannot write " + path);
        save(out);
    }

    static AnonymizationMap load(std::istream& in) {
        AnonymizationMap map;
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::istringstream fields(line);
            std::string kind, raw, number;
            if (!std::getline(fields, kind, '\t') || !std::getline(fields, raw, '\t') ||
                !std::getline(fields, number) || (kind != "h" && kind != "a"))
                throw Error(errc::malformed_snapshot,
                            "mapping line " + std::to_string(line_no) + " is not k\\traw\\tn");
            int n = 0;
            try {
                n = std::stoi(number);
            } catch (const std::exception&) {
                throw Error(errc::malformed_snapshot,
                            "mapping line " + std::to_string(line_no) + " has a bad number");
            }
            auto& table = kind == "h" ? map.hosts : map.as_labels;
            if (!table.emplace(raw, n).second)
                throw Error(errc::malformed_snapshot, "duplicate mapping entry: " + raw);
        }
        return map;
    }
    static AnonymizationMap load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(errc::io_error, "cannot read " + path);
        return load(in);
    }

private:
    static int next_number(const std::map<std::string, int>& table) {
        int max = 0;
        for (const auto& [raw, n] : table) max = std::max(max, n);
        return max + 1;
    }
};

// ---------------------------------------------------------------------------
// Blackening helpers
// ---------------------------------------------------------------------------

namespace detail {

constexpr const char* kRedacted = "[redacted]";

/// Address-shaped substrings: IPv4 literals, FQDNs (alpha TLD, so version
/// strings like "3.4.1" stay), and colon-hex IPv6 literals.
inline std::string blacken_addresses(const std::string& text) {
    static const std::regex ipv4(R"((\d{1,3}\.){3}\d{1,3})");
    static const std::regex fqdn(R"([A-Za-z0-9][A-Za-z0-9-]*(\.[A-Za-z0-9][A-Za-z0-9-]*)*\.[A-Za-z]{2,})");
    static const std::regex ipv6(R"([0-9A-Fa-f]{0,4}(:[0-9A-Fa-f]{0,4}){2,7})");
    std::string out = std::regex_replace(text, ipv4, kRedacted);
    out = std::regex_replace(out, fqdn, kRedacted);
    return std::regex_replace(out, ipv6, kRedacted);
}

/// blacken_addresses would eat the URL scheme itself ("opc.tcp" parses as an
/// FQDN), so schemes are peeled off first.
inline std::string blacken_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return blacken_addresses(url);
    return url.substr(0, scheme_end + 3) + blacken_addresses(url.substr(scheme_end + 3));
}

/// Longest-first literal replacement, so nested hosts ("10.0.0.1" inside
/// "10.0.0.12") resolve to the more specific entry.
struct Replacements {
    std::vector<std::pair<std::string, std::string>> items;  // raw -> token

    void apply(std::string& text) const {
        for (const auto& [raw, token] : items) {
            size_t pos = 0;
            while ((pos = text.find(raw, pos)) != std::string::npos) {
                text.replace(pos, raw.size(), token);
                pos += token.size();
            }
        }
    }

    void sort() {
        std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
            if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
            return a.first < b.first;
        });
    }
};

inline void scrub_json_strings(json& j, const Replacements& repl) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        repl.apply(s);
        j = std::move(s);
    } else if (j.is_object() || j.is_array()) {
        for (auto& child : j) scrub_json_strings(child, repl);
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// anonymize
// ---------------------------------------------------------------------------

/// Rewrites a snapshot for release: every scanned host becomes host-N and
/// every AS label AS-N (consecutive, first-seen order, stable under a reused
/// map); certificate DER is dropped and the retained certificate facts plus
/// endpoint URLs have address-shaped strings blackened. Node names and
/// access bits survive untouched. Running it on an already-anonymized
/// snapshot returns it unchanged.
inline Snapshot anonymize(const Snapshot& snap, AnonymizationMap& map) {
    if (snap.anonymized) return snap;

    // Number hosts in record order so output is deterministic.
    for (const auto& r : snap.records) map.host_number(r.probe.target.host);

    detail::Replacements repl;
    for (const auto& [raw, n] : map.hosts) repl.items.emplace_back(raw, "host-" + std::to_string(n));
    repl.sort();

    Snapshot out;
    out.snapshot_id = snap.snapshot_id;
    out.anonymized = true;
    for (const auto& r : snap.records) {
        // One pass over every string field, via the serialized form; base64
        // certificate blobs cannot collide with host spellings.
        json j = record_to_json(r);
        detail::scrub_json_strings(j, repl);
        SnapshotRecord rec = record_from_json(j);

        rec.probe.server_certificate.reset();
        for (auto& ep : rec.probe.endpoints) {
            ep.server_certificate = wire::UaBytes{};
            if (!ep.endpoint_url.null)
                ep.endpoint_url = wire::UaString(detail::blacken_url(ep.endpoint_url.str()));
            for (auto& u : ep.server.discovery_urls)
                if (!u.null) u = wire::UaString(detail::blacken_url(u.str()));
        }
        if (rec.certificate) {
            auto& c = *rec.certificate;
            c.subject = detail::blacken_addresses(c.subject);
            c.issuer = detail::blacken_addresses(c.issuer);
            c.common_name = detail::blacken_addresses(c.common_name);
            for (auto& san : c.subject_alt_names) san = detail::blacken_addresses(san);
        }
        if (rec.assessment.as_label) rec.assessment.as_label = map.as_token(*rec.assessment.as_label);
        out.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace uascan::report

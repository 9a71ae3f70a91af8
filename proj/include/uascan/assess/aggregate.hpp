#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uascan/assess/assessment.hpp"

namespace uascan::assess {

/// Columns of the access-control matrix. Accessible hosts split by system
/// classification; inaccessible hosts by what rejected them. Session
/// failures on faulty endpoint configurations count as authentication
/// rejects, not channel rejects.
enum class AccessOutcome : uint8_t {
    Production = 0,
    Test = 1,
    Unclassified = 2,
    RejectedAuthentication = 3,
    RejectedSecureChannel = 4,
};
constexpr size_t kAccessOutcomeCount = 5;

inline const char* to_string(AccessOutcome o) {
    switch (o) {
    case AccessOutcome::Production: return "Production";
    case AccessOutcome::Test: return "Test";
    case AccessOutcome::Unclassified: return "Unclassified";
    case AccessOutcome::RejectedAuthentication: return "RejectedAuthentication";
    case AccessOutcome::RejectedSecureChannel: return "RejectedSecureChannel";
    }
    return "?";
}

/// Every reached full server lands in exactly one column.
inline AccessOutcome access_outcome(const HostAssessment& a) {
    switch (a.session_outcome) {
    case client::SessionProbe::AnonymousAccepted:
        switch (a.system_class) {
        case SystemClass::Production: return AccessOutcome::Production;
        case SystemClass::Test: return AccessOutcome::Test;
        case SystemClass::Unclassified: return AccessOutcome::Unclassified;
        }
        return AccessOutcome::Unclassified;
    case client::SessionProbe::SecureChannelRejected:
        return AccessOutcome::RejectedSecureChannel;
    case client::SessionProbe::AuthenticationRejected:
    case client::SessionProbe::InvalidConfiguration:
    case client::SessionProbe::NotAttempted:
        return AccessOutcome::RejectedAuthentication;
    }
    return AccessOutcome::RejectedAuthentication;
}

/// How many hosts support an option at all, and how many have it as their
/// weakest / strongest offer.
struct OptionCount {
    uint32_t supported = 0;
    uint32_t least = 0;
    uint32_t most = 0;

    bool operator==(const OptionCount&) const = default;
};

/// Per-deficit totals with manufacturer and AS breakdowns.
struct DeficitBreakdown {
    uint32_t total = 0;
    std::map<std::string, uint32_t> by_manufacturer;
    std::map<std::string, uint32_t> by_as;

    bool operator==(const DeficitBreakdown&) const = default;
};

constexpr const char* kUnattributed = "(unattributed)";
constexpr const char* kUnknownAs = "(unknown)";

struct FleetAggregate {
    uint32_t host_count = 0;         // assessments seen
    uint32_t unreachable_count = 0;  // never spoke the protocol
    uint32_t full_server_count = 0;  // reached, role FullServer
    uint32_t discovery_server_count = 0;

    std::map<wire::SecurityMode, OptionCount> modes;
    std::map<PolicyId, OptionCount> policies;
    std::map<DeficitKind, DeficitBreakdown> deficits;

    // auth-combination mask (0..15) x AccessOutcome; reached full servers only
    std::array<std::array<uint32_t, kAccessOutcomeCount>, auth::kMaskLimit> access_matrix{};
    uint32_t matrix_total = 0;

    uint32_t hosts_with_findings = 0;            // full servers with >= 1 finding
    std::optional<double> deficit_rate;          // hosts_with_findings / full_server_count

    bool operator==(const FleetAggregate&) const = default;

    uint32_t matrix_row_total(uint8_t mask) const {
        uint32_t n = 0;
        for (auto c : access_matrix[mask]) n += c;
        return n;
    }
    uint32_t matrix_column_total(AccessOutcome o) const {
        uint32_t n = 0;
        for (const auto& row : access_matrix) n += row[static_cast<size_t>(o)];
        return n;
    }
};

/// Merges per-host assessments. Associative and order-independent: every
/// count is a sum over hosts, and each host contributes to exactly one cell
/// of the access matrix.
inline FleetAggregate aggregate_fleet(const std::vector<HostAssessment>& assessments) {
    FleetAggregate agg;
    for (const auto& a : assessments) {
        ++agg.host_count;
        if (!a.reached) {
            ++agg.unreachable_count;
            continue;
        }
        if (a.role == Role::DiscoveryServer) {
            ++agg.discovery_server_count;
            continue;
        }
        ++agg.full_server_count;

        if (a.has_endpoints) {
            for (auto m : a.offered_modes) agg.modes[m].supported++;
            for (auto p : a.offered_policies) agg.policies[p].supported++;
            agg.modes[a.security.least_mode].least++;
            agg.modes[a.security.most_mode].most++;
            agg.policies[a.security.least_policy].least++;
            agg.policies[a.security.most_policy].most++;

            agg.access_matrix[a.auth_tokens & (auth::kMaskLimit - 1)][static_cast<size_t>(access_outcome(a))]++;
            ++agg.matrix_total;
        } else {
            // No endpoints: the host still occupies one matrix cell (empty
            // auth row, rejected-by-authentication column).
            agg.access_matrix[0][static_cast<size_t>(access_outcome(a))]++;
            ++agg.matrix_total;
        }

        if (!a.findings.empty()) ++agg.hosts_with_findings;
        for (const auto& f : a.findings) {
            auto& d = agg.deficits[f.kind];
            ++d.total;
            ++d.by_manufacturer[a.manufacturer.value_or(kUnattributed)];
            ++d.by_as[a.as_label.value_or(kUnknownAs)];
        }
    }
    if (agg.full_server_count > 0)
        agg.deficit_rate = static_cast<double>(agg.hosts_with_findings) / agg.full_server_count;
    return agg;
}

}  // namespace uascan::assess

#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uascan/assess/aggregate.hpp"
#include "uascan/errors.hpp"

namespace uascan::report {

enum class ReportFormat { Text, Csv, Jsonl };

inline ReportFormat report_format_from_name(std::string_view name) {
    if (name == "text") return ReportFormat::Text;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "jsonl") return ReportFormat::Jsonl;
    throw Error(errc::unsupported_format, "unknown report format: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Percentage formatting
//
// Fractions render in the house style of the survey tables this report
// mirrors: at or above 10% the integer part alone (floor), below 10% one
// decimal (round half-up). Hence 41.65% -> "41%" but 1.885% -> "1.9%".
// ---------------------------------------------------------------------------

inline std::string format_pct(uint64_t count, uint64_t total) {
    if (total == 0) return "0.0%";
    const double p = 100.0 * static_cast<double>(count) / static_cast<double>(total);
    char buf[32];
    if (p >= 10.0) {
        std::snprintf(buf, sizeof buf, "%d%%", static_cast<int>(std::floor(p + 1e-9)));
    } else {
        const double tenths = std::floor(p * 10.0 + 0.5 + 1e-9) / 10.0;
        std::snprintf(buf, sizeof buf, "%.1f%%", tenths);
    }
    return buf;
}

inline std::string format_count_pct(uint64_t count, uint64_t total) {
    return std::to_string(count) + " (" + format_pct(count, total) + ")";
}

// ---------------------------------------------------------------------------
// Cell model
//
// Every number in the report is one (table, row, column, count, formatted)
// cell; the three output formats are alternative serializations of the same
// cell list, so they agree by construction.
// ---------------------------------------------------------------------------

namespace detail {

struct Cell {
    std::string table;
    std::string row;
    std::string column;
    uint64_t count = 0;
    std::string formatted;
};

inline uint64_t hosts_with_endpoints(const assess::FleetAggregate& agg) {
    uint64_t n = 0;
    for (const auto& [mode, c] : agg.modes) n += c.least;
    return n;
}

inline std::vector<Cell> build_cells(const assess::FleetAggregate& agg) {
    std::vector<Cell> cells;
    auto plain = [&](std::string table, std::string row, std::string column, uint64_t count) {
        cells.push_back({std::move(table), std::move(row), std::move(column), count,
                         std::to_string(count)});
    };
    auto pct = [&](std::string table, std::string row, std::string column, uint64_t count,
                   uint64_t total) {
        cells.push_back({std::move(table), std::move(row), std::move(column), count,
                         format_count_pct(count, total)});
    };

    if (agg.host_count == 0) return cells;

    plain("summary", "hosts", "total", agg.host_count);
    plain("summary", "hosts", "unreachable", agg.unreachable_count);
    plain("summary", "hosts", "discovery_servers", agg.discovery_server_count);
    plain("summary", "hosts", "full_servers", agg.full_server_count);
    pct("summary", "hosts", "with_findings", agg.hosts_with_findings, agg.full_server_count);

    const uint64_t with_eps = hosts_with_endpoints(agg);
    for (const auto& [mode, c] : agg.modes) {
        const std::string row = wire::to_string(mode);
        pct("modes", row, "supported", c.supported, with_eps);
        pct("modes", row, "least", c.least, with_eps);
        pct("modes", row, "most", c.most, with_eps);
    }
    for (const auto& [policy, c] : agg.policies) {
        const std::string row = policy_name(policy);
        pct("policies", row, "supported", c.supported, with_eps);
        pct("policies", row, "least", c.least, with_eps);
        pct("policies", row, "most", c.most, with_eps);
    }

    for (const auto& [kind, d] : agg.deficits) {
        const std::string row = assess::to_string(kind);
        pct("deficits", row, "total", d.total, agg.full_server_count);
        for (const auto& [name, n] : d.by_manufacturer)
            plain("deficits_by_manufacturer", row, name, n);
        for (const auto& [name, n] : d.by_as) plain("deficits_by_as", row, name, n);
    }

    for (uint8_t mask = 0; mask < assess::auth::kMaskLimit; ++mask) {
        if (agg.matrix_row_total(mask) == 0) continue;  // unused combinations omitted
        const std::string row = assess::auth_to_string(mask);
        for (size_t col = 0; col < assess::kAccessOutcomeCount; ++col) {
            const auto outcome = static_cast<assess::AccessOutcome>(col);
            pct("access_matrix", row, assess::to_string(outcome),
                agg.access_matrix[mask][col], agg.matrix_total);
        }
        pct("access_matrix", row, "total", agg.matrix_row_total(mask), agg.matrix_total);
    }
    uint64_t accessible = 0;
    uint64_t unaccessible = 0;
    for (size_t col = 0; col < assess::kAccessOutcomeCount; ++col) {
        const auto outcome = static_cast<assess::AccessOutcome>(col);
        const uint64_t n = agg.matrix_column_total(outcome);
        pct("access_matrix_totals", "column_total", assess::to_string(outcome), n,
            agg.matrix_total);
        if (outcome == assess::AccessOutcome::RejectedAuthentication ||
            outcome == assess::AccessOutcome::RejectedSecureChannel)
            unaccessible += n;
        else
            accessible += n;
    }
    pct("access_matrix_totals", "grand_total", "accessible", accessible, agg.matrix_total);
    pct("access_matrix_totals", "grand_total", "unaccessible", unaccessible, agg.matrix_total);

    return cells;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string render_text(const std::vector<Cell>& cells) {
    std::ostringstream out;
    out << "uascan fleet report\n";
    std::string table;
    std::string row;
    for (const auto& c : cells) {
        if (c.table != table) {
            table = c.table;
            row.clear();
            out << "\n== " << table << " ==\n";
        }
        if (c.row != row) {
            row = c.row;
            out << row << "\n";
        }
        out << "    " << c.column << ": " << c.formatted << "\n";
    }
    return out.str();
}

inline std::string render_csv(const std::vector<Cell>& cells) {
    std::ostringstream out;
    out << "table,row,column,count,formatted\n";
    for (const auto& c : cells)
        out << csv_escape(c.table) << ',' << csv_escape(c.row) << ',' << csv_escape(c.column)
            << ',' << c.count << ',' << csv_escape(c.formatted) << '\n';
    return out.str();
}

inline std::string render_jsonl(const std::vector<Cell>& cells) {
    std::ostringstream out;
    for (const auto& c : cells)
        out << nlohmann::ordered_json{{"table", c.table},
                                      {"row", c.row},
                                      {"column", c.column},
                                      {"count", c.count},
                                      {"formatted", c.formatted}}
                   .dump()
            << '\n';
    return out.str();
}

}  // namespace detail

/// Renders the aggregate: option support with least/most columns, deficit
/// totals with manufacturer and AS breakdowns, and the auth-combination by
/// outcome access matrix with "count (pct)" cells. An empty aggregate
/// renders headers only.
inline std::string render_fleet_report(const assess::FleetAggregate& agg, ReportFormat format) {
    const auto cells = detail::build_cells(agg);
    switch (format) {
    case ReportFormat::Text: return detail::render_text(cells);
    case ReportFormat::Csv: return detail::render_csv(cells);
    case ReportFormat::Jsonl: return detail::render_jsonl(cells);
    }
    throw Error(errc::unsupported_format, "unknown report format");
}

}  // namespace uascan::report

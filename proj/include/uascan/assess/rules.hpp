#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "uascan/errors.hpp"

namespace uascan::assess {

/// One classification rule: case-insensitive substring -> label.
struct Rule {
    std::string pattern;
    std::string label;

    bool operator==(const Rule&) const = default;
};

using RuleSet = std::vector<Rule>;

namespace detail {
inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}
}  // namespace detail

/// Parses `pattern<TAB>label` lines. Blank lines and '#' comments are
/// skipped. A data line without a tab, or with an empty pattern or label,
/// is malformed: better to refuse a rule file than to silently drop rules.
inline RuleSet parse_rules(std::string_view text, const std::string& origin = "<string>") {
    RuleSet rules;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        size_t tab = t.find('\t');
        if (tab == std::string_view::npos)
            throw Error(errc::malformed_rule_file,
                        origin + ":" + std::to_string(line_no) + ": expected pattern<TAB>label");
        std::string_view pattern = detail::trim(t.substr(0, tab));
        std::string_view label = detail::trim(t.substr(tab + 1));
        if (pattern.empty() || label.empty())
            throw Error(errc::malformed_rule_file,
                        origin + ":" + std::to_string(line_no) + ": empty pattern or label");
        rules.push_back(Rule{std::string(pattern), std::string(label)});
    }
    return rules;
}

inline RuleSet load_rules(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::malformed_rule_file, "cannot open rule file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_rules(buf.str(), path);
}

/// First rule whose pattern occurs case-insensitively in `text` wins.
inline std::optional<std::string> match_rules(const RuleSet& rules, std::string_view text) {
    std::string hay = detail::lower(text);
    for (const auto& rule : rules)
        if (hay.find(detail::lower(rule.pattern)) != std::string::npos) return rule.label;
    return std::nullopt;
}

}  // namespace uascan::assess

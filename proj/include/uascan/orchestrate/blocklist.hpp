#pragma once

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "uascan/errors.hpp"

namespace uascan::orchestrate {

// ---------------------------------------------------------------------------
// Blocklist
//
// One entry per line: an IPv4 CIDR ("192.0.2.0/24"), a bare IPv4 address
// (treated as /32), or a hostname (exact, case-insensitive match). Blank
// lines and #-comments are skipped. Blocklisted targets must never see a
// connection attempt, so matching happens before any socket is opened.
// ---------------------------------------------------------------------------

class Blocklist {
public:
    Blocklist() = default;

    static Blocklist parse(std::istream& in) {
        Blocklist b;
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto entry = trim(line);
            if (entry.empty() || entry[0] == '#') continue;
            b.add(entry, line_no);
        }
        return b;
    }

    static Blocklist load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(errc::io_error, "cannot read " + path);
        return parse(in);
    }

    bool blocked(const std::string& host) const {
        uint32_t addr = 0;
        if (parse_ipv4(host, addr)) {
            for (const auto& c : cidrs_)
                if ((addr & c.mask) == c.network) return true;
            return false;
        }
        return names_.count(lower(host)) > 0;
    }

    size_t size() const { return cidrs_.size() + names_.size(); }
    bool empty() const { return cidrs_.empty() && names_.empty(); }

private:
    struct Cidr {
        uint32_t network = 0;  // host byte order, already masked
        uint32_t mask = 0;
    };

    void add(std::string_view entry, size_t line_no) {
        const std::string text(entry);
        const auto slash = text.find('/');
        if (slash != std::string::npos) {
            uint32_t addr = 0;
            int prefix = -1;
            try {
                prefix = std::stoi(text.substr(slash + 1));
            } catch (const std::exception&) {
                prefix = -1;
            }
            if (!parse_ipv4(text.substr(0, slash), addr) || prefix < 0 || prefix > 32)
                throw Error(errc::malformed_rule_file,
                            "blocklist line " + std::to_string(line_no) + ": bad CIDR " + text);
            const uint32_t mask = prefix == 0 ? 0 : ~uint32_t{0} << (32 - prefix);
            cidrs_.push_back({addr & mask, mask});
            return;
        }
        uint32_t addr = 0;
        if (parse_ipv4(text, addr)) {
            cidrs_.push_back({addr, ~uint32_t{0}});
            return;
        }
        names_.insert(lower(text));
    }

    static bool parse_ipv4(const std::string& text, uint32_t& out) {
        in_addr a{};
        if (inet_pton(AF_INET, text.c_str(), &a) != 1) return false;
        out = ntohl(a.s_addr);
        return true;
    }

    static std::string lower(std::string_view s) {
        std::string out(s);
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return out;
    }

    static std::string_view trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    }

    std::vector<Cidr> cidrs_;
    std::set<std::string> names_;
};

}  // namespace uascan::orchestrate

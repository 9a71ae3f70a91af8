#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "uascan/bytes.hpp"

#ifndef UASCAN_FIXTURE_DIR
#error "UASCAN_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
    return std::string(UASCAN_FIXTURE_DIR) + "/" + name;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open fixture: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Loads a .hex fixture (comments and whitespace ignored).
inline uascan::Bytes load_fixture(const std::string& name) {
    return uascan::from_hex(read_text_file(fixture_path(name)));
}

}  // namespace testsupport

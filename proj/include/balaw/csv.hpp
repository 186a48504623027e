#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace balaw {

/// 17 significant digits round-trip a 64-bit float exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Comma-separated writer with a header row; numeric cells are written with
/// 17 significant digits so artifacts are reproducible bit for bit.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::initializer_list<std::string> header)
        : os_(path) {
        if (!os_) throw std::runtime_error("cannot open for writing: " + path);
        bool first = true;
        for (const auto& h : header) {
            if (!first) os_ << ',';
            os_ << h;
            first = false;
        }
        os_ << '\n';
    }

    void row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) os_ << ',';
            os_ << c;
            first = false;
        }
        os_ << '\n';
    }

    static std::string num(double v) { return format_double(v); }
    static std::string num(int v) { return std::to_string(v); }

private:
    std::ofstream os_;
};

}  // namespace balaw

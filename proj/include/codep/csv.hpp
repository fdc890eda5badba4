#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace codep::csv {

/// Splits one CSV line on commas. No quoting support; the file formats used
/// here never embed commas in fields.
inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        size_t b = field.find_first_not_of(' ');
        out.push_back(b == std::string::npos ? "" : field.substr(b));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline Table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    Table t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split_line(line);
        if (first) {
            t.header = std::move(fields);
            first = false;
        } else {
            t.rows.push_back(std::move(fields));
        }
    }
    return t;
}

/// Writer that formats doubles with a fixed repeatable format and writes the
/// file atomically (write to temp, then rename).
class Writer {
public:
    explicit Writer(std::string path) : path_(std::move(path)), tmp_(path_ + ".tmp") {
        out_.open(tmp_);
        if (!out_) throw std::runtime_error("cannot open for write: " + tmp_);
    }

    ~Writer() {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    Writer& raw(const std::string& s) {
        out_ << s;
        return *this;
    }

    Writer& field(const std::string& s) {
        sep();
        out_ << s;
        return *this;
    }

    Writer& field(double v) {
        sep();
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        out_ << buf;
        return *this;
    }

    Writer& field(int v) {
        sep();
        out_ << v;
        return *this;
    }

    Writer& endrow() {
        out_ << "\n";
        at_row_start_ = true;
        return *this;
    }

    void commit() {
        out_.close();
        std::filesystem::rename(tmp_, path_);
        committed_ = true;
    }

private:
    void sep() {
        if (!at_row_start_) out_ << ",";
        at_row_start_ = false;
    }

    std::string path_, tmp_;
    std::ofstream out_;
    bool at_row_start_ = true;
    bool committed_ = false;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace codep::csv

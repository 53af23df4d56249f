#ifndef COORDGRAPH_CSV_HPP
#define COORDGRAPH_CSV_HPP

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace coordgraph::csv {

/// Splits one CSV record. Handles RFC-style double-quoted fields (URLs may
/// contain commas). Lines starting with '#' are treated as comments by the
/// callers, not here.
inline std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

/// Reads all records from a stream; skips blank lines and '#' comments.
/// Comment lines are collected so callers can recover embedded metadata.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments;
};

inline Table read_table(std::istream& in, bool has_header = true) {
    if (!in) throw std::runtime_error("csv: unreadable stream");
    Table t;
    std::string line;
    bool header_seen = !has_header;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line);
            continue;
        }
        auto fields = split_record(line);
        if (!header_seen) {
            t.header = std::move(fields);
            header_seen = true;
        } else {
            t.rows.push_back(std::move(fields));
        }
    }
    return t;
}

inline Table read_file(const std::filesystem::path& path, bool has_header = true) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path.string());
    return read_table(in, has_header);
}

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote_field(fields[i]);
        }
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

}  // namespace coordgraph::csv

#endif

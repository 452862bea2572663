#include "radlearn/table_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "radlearn/error.hpp"

namespace radlearn {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw ValidationError("cannot serialize a non-finite value");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ValidationError("not a finite decimal number: '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

void write_feature_table(const FeatureTable& t, const std::filesystem::path& path) {
    t.validate();
    for (const auto& id : t.sample_ids) {
        if (id.find_first_of(",\n\r") != std::string::npos) throw ValidationError("sample id contains a separator: " + id);
    }
    for (const auto& n : t.feature_names) {
        if (n.find_first_of(",\n\r") != std::string::npos) throw ValidationError("feature name contains a separator: " + n);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "sample_id,label";
    for (const auto& n : t.feature_names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
        out << t.sample_ids[r] << ',' << t.labels[r];
        for (double v : t.values[r]) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("feature table is empty: " + path.string());
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "sample_id" || header[1] != "label") {
        throw ValidationError("feature table header must start with sample_id,label");
    }
    FeatureTable t;
    t.feature_names.assign(header.begin() + 2, header.end());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ValidationError("ragged row at line " + std::to_string(line_no) + " of " + path.string());
        }
        if (cells[1] != "0" && cells[1] != "1") {
            throw ValidationError("label must be 0 or 1 at line " + std::to_string(line_no) + ", got '" + cells[1] + "'");
        }
        t.sample_ids.push_back(cells[0]);
        t.labels.push_back(cells[1] == "1" ? 1 : 0);
        std::vector<double> row;
        row.reserve(cells.size() - 2);
        for (std::size_t c = 2; c < cells.size(); ++c) row.push_back(parse_double(cells[c]));
        t.values.push_back(std::move(row));
    }
    t.validate();
    return t;
}

}  // namespace radlearn

#include "contractive/scan_table.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "contractive/errors.hpp"

namespace contractive {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

Cell parse_cell(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(ErrorKind::Config, "cannot parse table cell '" + s + "'");
    return v;
}

}  // namespace

void ScanTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        std::ostringstream os;
        os << "row has " << row.size() << " cells, table has " << columns.size() << " columns";
        throw Error(ErrorKind::Config, os.str());
    }
    for (auto& c : row)
        if (c && !std::isfinite(*c)) c.reset();
    rows.push_back(std::move(row));
}

std::size_t ScanTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw Error(ErrorKind::Config, "table has no column '" + name + "'");
}

bool ScanTable::has_column(const std::string& name) const {
    for (const auto& c : columns)
        if (c == name) return true;
    return false;
}

Cell ScanTable::at(std::size_t row, const std::string& column) const {
    return rows.at(row)[column_index(column)];
}

std::vector<Cell> ScanTable::column(const std::string& name) const {
    const std::size_t j = column_index(name);
    std::vector<Cell> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
}

void ScanTable::set_meta(const std::string& key, const std::string& value) {
    for (auto& [k, v] : metadata)
        if (k == key) {
            v = value;
            return;
        }
    metadata.emplace_back(key, value);
}

std::optional<std::string> ScanTable::meta(const std::string& key) const {
    for (const auto& [k, v] : metadata)
        if (k == key) return v;
    return std::nullopt;
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw Error(ErrorKind::Config, "unknown output format '" + s + "' (expected csv or json)");
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, ptr);
}

void write_csv(const ScanTable& t, std::ostream& os) {
    for (const auto& [k, v] : t.metadata) os << "# " << k << '=' << v << '\n';
    for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) os << ',';
            if (r[j]) os << format_double(*r[j]);
        }
        os << '\n';
    }
}

void write_json(const ScanTable& t, std::ostream& os) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.metadata) meta[k] = v;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (const auto& c : r) row.push_back(c ? nlohmann::ordered_json(*c) : nlohmann::ordered_json());
        rows.push_back(std::move(row));
    }
    nlohmann::ordered_json doc;
    doc["metadata"] = std::move(meta);
    doc["columns"] = t.columns;
    doc["rows"] = std::move(rows);
    os << doc.dump(1) << '\n';
}

void write_table(const ScanTable& t, std::ostream& os, Format f) {
    if (f == Format::Json)
        write_json(t, os);
    else
        write_csv(t, os);
}

ScanTable read_csv(std::istream& is) {
    ScanTable t;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::Config, "bad metadata line '" + line + "'");
            t.set_meta(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        if (!header) {
            t.columns = split_commas(line);
            header = true;
            continue;
        }
        if (line.empty()) continue;
        std::vector<Cell> row;
        for (const auto& s : split_commas(line)) row.push_back(parse_cell(s));
        t.add_row(std::move(row));
    }
    if (!header) throw Error(ErrorKind::Config, "table has no header row");
    return t;
}

ScanTable read_json(std::istream& is) {
    const auto doc = nlohmann::ordered_json::parse(is);
    ScanTable t;
    for (const auto& [k, v] : doc.at("metadata").items()) t.set_meta(k, v.get<std::string>());
    t.columns = doc.at("columns").get<std::vector<std::string>>();
    for (const auto& r : doc.at("rows")) {
        std::vector<Cell> row;
        for (const auto& c : r) row.push_back(c.is_null() ? Cell{} : Cell{c.get<double>()});
        t.add_row(std::move(row));
    }
    return t;
}

}  // namespace contractive

#include "minvar/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "minvar/version.hpp"

namespace minvar {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_cell(const std::string& raw, const std::string& path, std::size_t line_no) {
    const std::string cell = trim(raw);
    if (cell.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') {
        throw ParseError(path + ":" + std::to_string(line_no) + ": bad number '" + cell +
                         "'");
    }
    return v;
}

}  // namespace

ReturnPanel load_returns_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open returns file '" + path + "'");
    }
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        header = split(t, ',');
        break;
    }
    if (header.size() < 2 || trim(header[0]) != "date") {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": header must be 'date,<asset>,...'");
    }
    std::vector<std::string> ids(header.begin() + 1, header.end());
    for (auto& id : ids) {
        id = trim(id);
        if (id.empty()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": empty asset id");
        }
    }
    const std::size_t n = ids.size();

    std::vector<Date> dates;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const std::vector<std::string> cells = split(t, ',');
        if (cells.size() != n + 1) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(n + 1) + " cells, got " +
                             std::to_string(cells.size()));
        }
        try {
            dates.push_back(Date::parse(trim(cells[0])));
        } catch (const ParseError& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        std::vector<double> row(n);
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = parse_cell(cells[j + 1], path, line_no);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError(path + ": no data rows");
    }

    Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t t2 = 0; t2 < rows.size(); ++t2) {
        for (std::size_t i = 0; i < n; ++i) {
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t2)) = rows[t2][i];
        }
    }
    return ReturnPanel(std::move(ids), std::move(dates), std::move(values));
}

void write_returns_csv(const ReturnPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << "date";
    for (const auto& id : panel.asset_ids()) {
        out << ',' << id;
    }
    out << '\n';
    char buf[40];
    for (Eigen::Index j = 0; j < panel.n_obs(); ++j) {
        out << panel.dates()[static_cast<std::size_t>(j)].to_string();
        for (Eigen::Index i = 0; i < panel.n_assets(); ++i) {
            const double v = panel.values()(i, j);
            out << ',';
            if (!ReturnPanel::is_missing(v)) {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out << buf;
            }
        }
        out << '\n';
    }
    if (!out) {
        throw Error("failed writing '" + path + "'");
    }
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& manifest,
                     const std::string& header)
    : out_(path) {
    if (!out_) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out_ << manifest << '\n' << header << '\n';
}

void CsvWriter::add_row(const std::string& row) {
    out_ << row << '\n';
}

void CsvWriter::add_comment(const std::string& text) {
    out_ << "# " << text << '\n';
}

std::string manifest_line(std::uint64_t seed, std::uint64_t config_hash) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "# manifest: tool=minvar version=%s seed=%llu config_hash=0x%016llx",
                  kVersion, static_cast<unsigned long long>(seed),
                  static_cast<unsigned long long>(config_hash));
    return buf;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_string(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ":" + e.what());
    }
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw ParseError(std::to_string(line_no) + ": bad section header '" + t +
                                 "'");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError(std::to_string(line_no) + ": expected key = value, got '" +
                             t + "'");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw ParseError(std::to_string(line_no) + ": empty key");
        }
        cfg.data_[section][key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
    const auto s = data_.find(section);
    if (s == data_.end()) {
        return fallback;
    }
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double Config::get_real(const std::string& section, const std::string& key,
                        double fallback) const {
    if (!has(section, key)) {
        return fallback;
    }
    const std::string v = get(section, key, "");
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
        throw InvalidInput("config " + section + "." + key + ": bad number '" + v + "'");
    }
    return x;
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
    if (!has(section, key)) {
        return fallback;
    }
    const std::string v = get(section, key, "");
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
        throw InvalidInput("config " + section + "." + key + ": bad integer '" + v + "'");
    }
    return x;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
    if (!has(section, key)) {
        return fallback;
    }
    const std::string v = get(section, key, "");
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no" || v == "off") {
        return false;
    }
    throw InvalidInput("config " + section + "." + key + ": bad boolean '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& section,
                                          const std::string& key,
                                          const std::vector<std::string>& fallback) const {
    if (!has(section, key)) {
        return fallback;
    }
    std::vector<std::string> out;
    for (const std::string& item : split(get(section, key, ""), ',')) {
        const std::string t = trim(item);
        if (!t.empty()) {
            out.push_back(t);
        }
    }
    return out;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
    data_[section][key] = value;
}

std::string Config::canonical() const {
    std::ostringstream out;
    for (const auto& [section, keys] : data_) {
        for (const auto& [key, value] : keys) {
            out << section << '.' << key << '=' << value << '\n';
        }
    }
    return out.str();
}

std::vector<double> parse_real_list(const std::vector<std::string>& items) {
    std::vector<double> out;
    out.reserve(items.size());
    for (const auto& s : items) {
        char* end = nullptr;
        const double x = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0') {
            throw InvalidInput("bad number '" + s + "' in list");
        }
        out.push_back(x);
    }
    return out;
}

std::vector<int> parse_int_list(const std::vector<std::string>& items) {
    std::vector<int> out;
    out.reserve(items.size());
    for (const auto& s : items) {
        char* end = nullptr;
        const long long x = std::strtoll(s.c_str(), &end, 10);
        if (end == s.c_str() || *end != '\0') {
            throw InvalidInput("bad integer '" + s + "' in list");
        }
        out.push_back(static_cast<int>(x));
    }
    return out;
}

}  // namespace minvar

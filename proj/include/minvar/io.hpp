#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "minvar/panel.hpp"

namespace minvar {

/// Wide returns CSV: header "date,<id>,<id>,..."; one row per date in
/// increasing order; empty cells mark missing observations. Throws
/// ParseError with the line number on malformed content.
ReturnPanel load_returns_csv(const std::string& path);

/// Mirror of load_returns_csv; numbers carry full precision so a
/// write-then-read round trip is exact.
void write_returns_csv(const ReturnPanel& panel, const std::string& path);

/// 64-bit FNV-1a, used to stamp outputs with a config fingerprint.
std::uint64_t fnv1a64(const std::string& text);

/// CSV writer that puts a manifest comment ahead of the header so every
/// output file records the seed and config that produced it.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& manifest,
              const std::string& header);
    void add_row(const std::string& row);
    void add_comment(const std::string& text);

private:
    std::ofstream out_;
};

/// "# manifest: tool=... version=... seed=... config_hash=0x..."
std::string manifest_line(std::uint64_t seed, std::uint64_t config_hash);

/// Flat sectioned key-value config:
///   [section]
///   key = value            # trailing comments allowed
/// Unknown sections and keys are tolerated at parse time; consumers validate
/// the keys they read.
class Config {
public:
    Config() = default;

    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_real(const std::string& section, const std::string& key,
                    double fallback) const;
    long long get_int(const std::string& section, const std::string& key,
                      long long fallback) const;
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const;
    /// Comma separated list; empty value or absent key yields fallback.
    std::vector<std::string> get_list(const std::string& section, const std::string& key,
                                      const std::vector<std::string>& fallback) const;

    void set(const std::string& section, const std::string& key,
             const std::string& value);

    /// Sections and keys in sorted order, one "section.key=value" per line.
    /// Hash this to fingerprint the effective configuration.
    std::string canonical() const;

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

std::vector<double> parse_real_list(const std::vector<std::string>& items);
std::vector<int> parse_int_list(const std::vector<std::string>& items);

}  // namespace minvar

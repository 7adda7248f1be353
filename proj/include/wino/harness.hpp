#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "wino/train.hpp"

namespace wino {
namespace harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat key=value files with [section] headers; '#' starts a comment.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    std::vector<std::string> sections() const;

    void set(const std::string& section, const std::string& key, const std::string& value);

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
};

// RFC 4180 quoting: wraps fields containing comma, quote, or newline.
std::string csv_field(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

// "lo:hi:logN" (log-spaced, N points), "lo:hi:N" (linear), or "v:v:1".
std::vector<double> parse_density_grid(const std::string& spec);

// Worker count capped by the WINO_THREADS environment variable.
unsigned effective_workers(unsigned requested);

// Checkpoints: a directory of WGT1 files plus a manifest.
void save_checkpoint(const std::string& dir, const train::Network& net);
train::Network load_checkpoint(const std::string& dir);

}  // namespace harness
}  // namespace wino

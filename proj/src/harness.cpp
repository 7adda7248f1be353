#include "wino/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wino {
namespace harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value at line " + std::to_string(lineno));
        cfg.values_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto s = values_.find(section);
    return s != values_.end() && s->second.count(key);
}

std::string Config::get(const std::string& section, const std::string& key) const {
    if (!has(section, key))
        throw ConfigError("missing config key [" + section + "] " + key);
    return values_.at(section).at(key);
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    return has(section, key) ? std::stod(get(section, key)) : fallback;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
    return has(section, key) ? std::stoll(get(section, key)) : fallback;
}

std::vector<std::string> Config::sections() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : values_) out.push_back(name);
    return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    values_[section][key] = value;
}

std::string csv_field(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    return out;
}

std::vector<double> parse_density_grid(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("density grid must be lo:hi:count or lo:hi:logN, got " + spec);
    const double lo = std::stod(spec.substr(0, c1));
    const double hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    std::string tail = spec.substr(c2 + 1);
    bool log_spaced = false;
    std::size_t count = 20;
    if (tail.rfind("log", 0) == 0) {
        log_spaced = true;
        tail = tail.substr(3);
        if (!tail.empty()) count = std::stoul(tail);
    } else {
        count = std::stoul(tail);
    }
    if (lo <= 0.0 || hi < lo || count == 0)
        throw ConfigError("bad density grid " + spec);
    std::vector<double> grid;
    if (count == 1 || hi == lo) {
        grid.push_back(lo);
        return grid;
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(count - 1);
        grid.push_back(log_spaced ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
    }
    return grid;
}

unsigned effective_workers(unsigned requested) {
    if (const char* env = std::getenv("WINO_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0 && static_cast<unsigned>(cap) < requested)
            return static_cast<unsigned>(cap);
    }
    return requested == 0 ? 1 : requested;
}

void save_checkpoint(const std::string& dir, const train::Network& net) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ostringstream text;
    text << "[network]\n"
         << "in_c=" << net.in_c << "\nin_h=" << net.in_h << "\nin_w=" << net.in_w
         << "\nclasses=" << net.n_classes << "\nconvs=" << net.convs.size() << "\n";
    for (const auto& conv : net.convs) {
        const std::string file = conv.name + ".wgt";
        write_wgt1(dir + "/" + file, conv.w);
        text << "[" << conv.name << "]\n";
        text << "domain=" << (conv.domain == train::Domain::winograd ? "winograd" : "spatial")
             << "\n";
        text << "file=" << file << "\n";
        text << "in_c=" << conv.in_c << "\nout_c=" << conv.out_c << "\n";
        text << "lambda=" << conv.lambda << "\nnorm=" << conv.norm << "\n";
        if (conv.mask.size() == conv.w.size()) {
            const std::string mfile = conv.name + ".mask.wgt";
            write_wgt1(dir + "/" + mfile, conv.mask);
            text << "mask=" << mfile << "\n";
        }
    }
    write_wgt1(dir + "/dense.wgt", net.dense.w);
    write_wgt1(dir + "/dense_bias.wgt",
               Tensor({net.dense.bias.size()}, net.dense.bias));
    text << "[dense]\nfile=dense.wgt\nbias=dense_bias.wgt\n";

    std::ofstream os(dir + "/manifest.cfg");
    if (!os) throw IoError("cannot write manifest in " + dir);
    os << text.str();
}

train::Network load_checkpoint(const std::string& dir) {
    Config m = Config::parse_file(dir + "/manifest.cfg");
    train::Network net;
    net.in_c = static_cast<std::size_t>(m.get_int("network", "in_c", 0));
    net.in_h = static_cast<std::size_t>(m.get_int("network", "in_h", 0));
    net.in_w = static_cast<std::size_t>(m.get_int("network", "in_w", 0));
    net.n_classes = static_cast<std::size_t>(m.get_int("network", "classes", 0));
    const auto n_convs = static_cast<std::size_t>(m.get_int("network", "convs", 0));
    const TransformSet tset = f2x2_3x3_transforms();
    for (std::size_t i = 0; i < n_convs; ++i) {
        const std::string name = "conv" + std::to_string(i + 1);
        train::ConvLayer conv;
        conv.name = name;
        conv.domain = m.get(name, "domain") == "winograd" ? train::Domain::winograd
                                                          : train::Domain::spatial;
        conv.w = read_wgt1(dir + "/" + m.get(name, "file"));
        conv.in_c = static_cast<std::size_t>(m.get_int(name, "in_c", 0));
        conv.out_c = static_cast<std::size_t>(m.get_int(name, "out_c", 0));
        conv.lambda = m.get_double(name, "lambda", 0.0);
        conv.norm = static_cast<int>(m.get_int(name, "norm", 1));
        conv.tset = tset;
        if (m.has(name, "mask")) conv.mask = read_wgt1(dir + "/" + m.get(name, "mask"));
        net.convs.push_back(std::move(conv));
    }
    net.dense.w = read_wgt1(dir + "/" + m.get("dense", "file"));
    Tensor bias = read_wgt1(dir + "/" + m.get("dense", "bias"));
    net.dense.bias = bias.data();
    return net;
}

}  // namespace harness
}  // namespace wino

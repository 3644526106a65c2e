#include "rdlab/io.hpp"
#include "rdlab/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace rdlab::io {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

void put_u64_le(std::ofstream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64_le(std::ofstream& os, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64_le(os, v);
}

bool get_u64_le(std::ifstream& is, std::uint64_t& v) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
    v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return true;
}

bool get_f64_le(std::ifstream& is, double& d) {
    std::uint64_t v;
    if (!get_u64_le(is, v)) return false;
    std::memcpy(&d, &v, 8);
    return true;
}

} // namespace

void Manifest::set(const std::string& key, const std::string& value) {
    auto it = index_.find(key);
    if (it != index_.end()) {
        entries_[it->second].second = value;
        return;
    }
    index_[key] = entries_.size();
    entries_.emplace_back(key, value);
}
void Manifest::set(const std::string& key, double value) { set(key, fmt(value)); }
void Manifest::set(const std::string& key, bool value) {
    set(key, std::string(value ? "true" : "false"));
}

bool Manifest::has(const std::string& key) const { return index_.count(key) > 0; }

const std::string& Manifest::get(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end())
        throw std::invalid_argument("manifest: missing key '" + key + "'");
    return entries_[it->second].second;
}

double Manifest::get_double(const std::string& key) const {
    return std::stod(get(key));
}

bool Manifest::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("manifest: bad boolean for '" + key + "'");
}

void Manifest::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
}

Manifest Manifest::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    Manifest m;
    std::string line;
    while (std::getline(is, line)) {
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("manifest: bad line '" + line + "'");
        m.set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    return m;
}

void write_profile_csv(const std::filesystem::path& path,
                       const FrontProfile& p) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "# c=" << fmt(p.speed()) << " normalization=phi(0)=0.5 direction="
       << (p.direction() == Direction::Increasing ? "increasing"
                                                  : "decreasing-reflect")
       << "\n";
    os << "xi,phi\n";
    for (std::size_t i = 0; i < p.size(); ++i)
        os << fmt(p.xi_at(i)) << "," << fmt(p.phi_at(i)) << "\n";
}

void write_snapshots(const std::filesystem::path& path, const Trajectory& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    for (const auto& g : t.snaps) {
        put_f64_le(os, g.t);
        put_u64_le(os, g.n());
        put_f64_le(os, g.x0);
        put_f64_le(os, g.dx);
        for (double v : g.u) put_f64_le(os, v);
    }
}

Trajectory read_snapshots(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    Trajectory t;
    for (;;) {
        GridField g;
        double tv;
        if (!get_f64_le(is, tv)) break;
        std::uint64_t n;
        if (!get_u64_le(is, n))
            throw std::runtime_error("snapshot file truncated");
        g.t = tv;
        if (!get_f64_le(is, g.x0) || !get_f64_le(is, g.dx))
            throw std::runtime_error("snapshot file truncated");
        g.u.resize(n);
        for (std::uint64_t i = 0; i < n; ++i)
            if (!get_f64_le(is, g.u[i]))
                throw std::runtime_error("snapshot file truncated");
        t.snaps.push_back(std::move(g));
    }
    if (t.snaps.empty()) throw std::runtime_error("empty snapshot file");
    return t;
}

void write_field_csv(const std::filesystem::path& path, const GridField& g) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "# t=" << fmt(g.t) << "\n";
    os << "x,u\n";
    for (std::size_t i = 0; i < g.n(); ++i)
        os << fmt(g.x(i)) << "," << fmt(g.u[i]) << "\n";
}

void CsvTable::save(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << row[i];
        os << "\n";
    }
}

void write_series_csv(const std::filesystem::path& path,
                      const std::string& value_name,
                      const std::vector<std::pair<double, double>>& series) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "t," << value_name << "\n";
    for (const auto& [t, v] : series) os << fmt(t) << "," << fmt(v) << "\n";
}

} // namespace rdlab::io

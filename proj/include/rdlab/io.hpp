#ifndef RDLAB_IO_HPP
#define RDLAB_IO_HPP

#include "rdlab/evolve.hpp"
#include "rdlab/front.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace rdlab::io {

// All numeric text output uses 17 significant digits.
std::string fmt(double v);

// ---- key = value manifests ----

// Ordered key-value file: one "key = value" per line, '#' comments.
class Manifest {
  public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, bool value);

    bool has(const std::string& key) const;
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

    void save(const std::filesystem::path& path) const;
    static Manifest load(const std::filesystem::path& path);

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
};

// ---- profile CSV ----

// Two columns (xi, phi) after a header line carrying the speed and the
// normalization convention.
void write_profile_csv(const std::filesystem::path& path,
                       const FrontProfile& p);

// ---- snapshot records ----

// Binary record per snapshot: t (f64), n (u64), x0 (f64), dx (f64),
// u[0..n) (f64), all little-endian. Records append back to back.
void write_snapshots(const std::filesystem::path& path, const Trajectory& t);
Trajectory read_snapshots(const std::filesystem::path& path);

void write_field_csv(const std::filesystem::path& path, const GridField& g);

// ---- generic CSV table ----

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    void add_row(const std::vector<std::string>& row) { rows.push_back(row); }
    void save(const std::filesystem::path& path) const;
};

// ---- time series CSV ----

void write_series_csv(const std::filesystem::path& path,
                      const std::string& value_name,
                      const std::vector<std::pair<double, double>>& series);

} // namespace rdlab::io

#endif

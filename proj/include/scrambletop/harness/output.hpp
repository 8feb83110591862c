// output.hpp: CSV, PGM heatmap and checksum manifest writers
//
// CSV: header row, numbers as %.17g. PGM: binary P5, 8-bit, row = θ, column = φ,
// linear between the emitted min and max, which are recorded in a `.scale` sidecar.
// Manifest: one `path sha256 bytes` line per emitted file, paths relative to the
// output directory, preceded by `#` comment lines.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace scrambletop::harness {

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_double(double x);

struct ManifestEntry {
    std::string path;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    std::string scenario;
    std::string config_echo;
    std::string version;
    double wall_seconds = 0.0;
    std::vector<ManifestEntry> entries;
    // validate scenario only: every check passed
    bool passed = true;
};

// Collects files written into one output directory and checksums them.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    void write_csv(const std::string& name, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);
    // Matrix rows as CSV rows, header `theta,phi_0,…` with the grid angles.
    void write_matrix_csv(const std::string& name, const Eigen::MatrixXd& m,
                          const std::vector<double>& row_coords, const std::vector<double>& col_coords);
    void write_pgm(const std::string& name, const Eigen::MatrixXd& m);
    void write_text(const std::string& name, const std::string& text);

    const std::vector<ManifestEntry>& entries() const { return entries_; }

private:
    void record(const std::string& name);

    std::filesystem::path root_;
    std::vector<ManifestEntry> entries_;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

struct ManifestCheck {
    bool ok = true;
    std::vector<std::string> problems;
};

// Recomputes every listed checksum relative to the manifest's directory.
ManifestCheck verify_manifest(const std::filesystem::path& path);

}  // namespace scrambletop::harness

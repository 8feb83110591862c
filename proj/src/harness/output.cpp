#include "scrambletop/harness/output.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace scrambletop::harness {

namespace fs = std::filesystem;

namespace {

void write_bytes(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw OutputError("write failed for '" + path.string() + "'");
}

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw OutputError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

OutputDir::OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec || !fs::is_directory(root_)) {
        throw OutputError("cannot create output directory '" + root_.string() + "': " + ec.message());
    }
}

void OutputDir::write_csv(const std::string& name, const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw std::invalid_argument("write_csv: header/column count mismatch");
    std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != rows) throw std::invalid_argument("write_csv: ragged columns in " + name);
    }
    std::string text;
    for (std::size_t k = 0; k < header.size(); ++k) text += (k ? "," : "") + header[k];
    text += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < columns.size(); ++k) text += (k ? "," : "") + format_double(columns[k][r]);
        text += '\n';
    }
    write_bytes(root_ / name, text);
    record(name);
}

void OutputDir::write_matrix_csv(const std::string& name, const Eigen::MatrixXd& m,
                                 const std::vector<double>& row_coords, const std::vector<double>& col_coords) {
    if (static_cast<Eigen::Index>(row_coords.size()) != m.rows() ||
        static_cast<Eigen::Index>(col_coords.size()) != m.cols()) {
        throw std::invalid_argument("write_matrix_csv: coordinate count mismatch");
    }
    std::vector<std::string> header{"theta"};
    std::vector<std::vector<double>> columns{row_coords};
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        header.push_back("phi=" + format_double(col_coords[j]));
        columns.emplace_back(m.rows());
        for (Eigen::Index i = 0; i < m.rows(); ++i) columns.back()[i] = m(i, j);
    }
    write_csv(name, header, columns);
}

void OutputDir::write_pgm(const std::string& name, const Eigen::MatrixXd& m) {
    if (m.size() == 0) throw std::invalid_argument("write_pgm: empty matrix");
    const double lo = m.minCoeff();
    const double hi = m.maxCoeff();
    const double span = hi - lo;
    std::string bytes = "P5\n" + std::to_string(m.cols()) + " " + std::to_string(m.rows()) + "\n255\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double u = span > 0.0 ? (m(i, j) - lo) / span : 0.0;
            bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(u, 0.0, 1.0) * 255.0))));
        }
    }
    write_bytes(root_ / name, bytes);
    record(name);
    write_text(name + ".scale", "min," + format_double(lo) + "\nmax," + format_double(hi) + "\n");
}

void OutputDir::write_text(const std::string& name, const std::string& text) {
    write_bytes(root_ / name, text);
    record(name);
}

void OutputDir::record(const std::string& name) {
    const fs::path path = root_ / name;
    entries_.push_back({name, sha256_file(path), fs::file_size(path)});
}

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
        throw OutputError("SHA-256 computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < length; ++k) {
        out.push_back(hex[digest[k] >> 4]);
        out.push_back(hex[digest[k] & 0xf]);
    }
    return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_bytes(path)); }

void write_manifest(const fs::path& path, const RunManifest& manifest) {
    std::ostringstream out;
    out << "# scrambletop " << manifest.version << '\n'
        << "# scenario " << manifest.scenario << '\n'
        << "# wall_seconds " << format_double(manifest.wall_seconds) << '\n';
    std::istringstream echo(manifest.config_echo);
    for (std::string line; std::getline(echo, line);) out << "# config " << line << '\n';
    for (const ManifestEntry& e : manifest.entries) out << e.path << ' ' << e.sha256 << ' ' << e.bytes << '\n';
    write_bytes(path, out.str());
}

ManifestCheck verify_manifest(const fs::path& path) {
    ManifestCheck check;
    std::istringstream in(read_bytes(path));
    const fs::path dir = path.parent_path();
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line.front() == '#') continue;
        std::istringstream fields(line);
        ManifestEntry e;
        if (!(fields >> e.path >> e.sha256 >> e.bytes)) {
            check.ok = false;
            check.problems.push_back("malformed manifest line: " + line);
            continue;
        }
        const fs::path file = dir / e.path;
        std::error_code ec;
        if (!fs::exists(file, ec)) {
            check.ok = false;
            check.problems.push_back("missing file " + e.path);
            continue;
        }
        if (fs::file_size(file) != e.bytes || sha256_file(file) != e.sha256) {
            check.ok = false;
            check.problems.push_back("checksum mismatch for " + e.path);
        }
    }
    return check;
}

}  // namespace scrambletop::harness

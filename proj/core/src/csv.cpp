#include "polaron/csv.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>

#include "polaron/errors.hpp"

namespace polaron {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    return out;
}

} // namespace

void emit_csv(const Trajectory& traj, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "t,theta,purity,parity,trace_error,min_eig\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << format_number(traj.times[i]) << ',' << format_number(traj.theta[i]) << ','
            << format_number(traj.purity[i]) << ',' << format_number(traj.parity[i]) << ','
            << format_number(traj.trace_error[i]) << ',' << format_number(traj.min_eig[i]) << '\n';
    }
}

void emit_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    for (std::size_t c = 0; c < header.size(); ++c) {
        out << (c ? "," : "") << header[c];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << format_number(row[c]);
        }
        out << '\n';
    }
}

void emit_metadata(const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    for (const auto& [key, value] : entries) {
        out << key << " = " << value << '\n';
    }
}

std::string git_blob_hash(const std::string& content) {
    const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
        throw Error("SHA-1 digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

} // namespace polaron

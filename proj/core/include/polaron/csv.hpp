// csv.hpp: deterministic text output

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "polaron/propagator.hpp"

namespace polaron {

// %.15g; identical bits give identical text.
std::string format_number(double v);

// Header `t,theta,purity,parity,trace_error,min_eig`, one row per sample.
void emit_csv(const Trajectory& traj, const std::filesystem::path& path);

// Arbitrary table with a header row.
void emit_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows,
                const std::filesystem::path& path);

void emit_metadata(const std::vector<std::pair<std::string, std::string>>& entries,
                   const std::filesystem::path& path);

// git blob id (SHA-1 of "blob <size>\0" + content), hex encoded.
std::string git_blob_hash(const std::string& content);

} // namespace polaron

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace fujita {

// shortest exact decimal form; deterministic across runs and platforms
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);

// write-to-temp-then-rename in the target directory, so readers never see a
// partial file; creates parent directories on demand
void atomic_write(const std::filesystem::path& path, const std::string& content);

// FNV-1a 64-bit, used for the output manifest
std::uint64_t fnv1a(const std::string& bytes);
std::string hash_hex(const std::string& bytes);

}  // namespace fujita

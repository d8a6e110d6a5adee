// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace pulsecal {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

std::string file_sha256(const std::filesystem::path &path);

/// Digest over the digests of several files, order-sensitive.
std::string combined_digest(std::span<const std::filesystem::path> paths);

}  // namespace pulsecal

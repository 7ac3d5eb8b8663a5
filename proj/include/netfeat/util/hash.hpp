#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace netfeat::util {

/// Lower-case hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view text);

/// Lower-case hex MD5.
std::string md5_hex(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> data);

} // namespace netfeat::util

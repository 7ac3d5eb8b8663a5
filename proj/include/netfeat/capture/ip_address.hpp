#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace netfeat::capture {

/// IPv4 or IPv6 address. IPv4 occupies the first 4 bytes of `bytes`, the
/// remaining bytes stay zero so that equal addresses compare equal.
struct IpAddress {
    std::uint8_t version = 4;
    std::array<std::uint8_t, 16> bytes{};

    static IpAddress v4(std::span<const std::uint8_t, 4> raw);
    static IpAddress v4(std::uint32_t host_order);
    static IpAddress v6(std::span<const std::uint8_t, 16> raw);
    static std::optional<IpAddress> parse(std::string_view text);

    std::size_t size() const { return version == 4 ? 4 : 16; }
    std::string to_string() const;

    /// Big-endian integer value (IPv4 in the low 32 bits).
    unsigned __int128 to_integer() const;

    friend auto operator<=>(const IpAddress&, const IpAddress&) = default;
    friend bool operator==(const IpAddress&, const IpAddress&) = default;
};

} // namespace netfeat::capture

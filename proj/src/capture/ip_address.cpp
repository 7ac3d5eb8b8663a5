#include "netfeat/capture/ip_address.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <string>

namespace netfeat::capture {

IpAddress IpAddress::v4(std::span<const std::uint8_t, 4> raw)
{
    IpAddress addr;
    addr.version = 4;
    std::copy(raw.begin(), raw.end(), addr.bytes.begin());
    return addr;
}

IpAddress IpAddress::v4(std::uint32_t host_order)
{
    const std::array<std::uint8_t, 4> raw{
        static_cast<std::uint8_t>(host_order >> 24), static_cast<std::uint8_t>(host_order >> 16),
        static_cast<std::uint8_t>(host_order >> 8), static_cast<std::uint8_t>(host_order)};
    return v4(std::span<const std::uint8_t, 4>(raw));
}

IpAddress IpAddress::v6(std::span<const std::uint8_t, 16> raw)
{
    IpAddress addr;
    addr.version = 6;
    std::copy(raw.begin(), raw.end(), addr.bytes.begin());
    return addr;
}

std::optional<IpAddress> IpAddress::parse(std::string_view text)
{
    const std::string s(text);
    std::array<std::uint8_t, 16> buf{};
    if (s.find(':') == std::string::npos) {
        if (inet_pton(AF_INET, s.c_str(), buf.data()) == 1)
            return v4(std::span<const std::uint8_t, 4>(buf.data(), 4));
        return std::nullopt;
    }
    if (inet_pton(AF_INET6, s.c_str(), buf.data()) == 1)
        return v6(std::span<const std::uint8_t, 16>(buf));
    return std::nullopt;
}

std::string IpAddress::to_string() const
{
    char out[INET6_ADDRSTRLEN] = {};
    inet_ntop(version == 4 ? AF_INET : AF_INET6, bytes.data(), out, sizeof(out));
    return out;
}

unsigned __int128 IpAddress::to_integer() const
{
    unsigned __int128 value = 0;
    for (std::size_t i = 0; i < size(); ++i)
        value = (value << 8) | bytes[i];
    return value;
}

} // namespace netfeat::capture

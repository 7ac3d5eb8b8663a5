#pragma once

#include "netfeat/capture/packet.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>

namespace netfeat::capture {

enum class SkipReason {
    UnsupportedLink,
    NonIp,
    Fragment,
    Malformed,
};

std::string_view to_string(SkipReason reason);

struct Skip {
    SkipReason reason;
};

using DecodeResult = std::variant<DecodedPacket, Skip>;

/// Decodes one frame down to the transport payload. Total: any byte string
/// yields either a packet or a Skip.
///
/// Frames whose capture length is shorter than the IP length (snaplen) keep
/// the bytes that were captured as payload. Non-first IP fragments are skipped.
DecodeResult decode_packet(std::span<const std::uint8_t> raw, LinkType link_type, Timestamp timestamp);

} // namespace netfeat::capture

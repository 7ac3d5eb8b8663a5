#pragma once

#include "netfeat/flow/biflow.hpp"
#include "netfeat/plugins/feature_record.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace netfeat::plugins {

namespace tls_content {
inline constexpr std::uint8_t change_cipher_spec = 20;
inline constexpr std::uint8_t alert = 21;
inline constexpr std::uint8_t handshake = 22;
inline constexpr std::uint8_t application_data = 23;
inline constexpr std::uint8_t heartbeat = 24;
} // namespace tls_content

struct TlsRecordHeader {
    std::size_t offset = 0;
    std::uint8_t content_type = 0;
    std::uint16_t version = 0;
    /// Record payload length (excludes the 5-byte header).
    std::uint16_t length = 0;
};

/// True when the 5 bytes at `bytes` look like a TLS record header.
bool plausible_tls_header(std::span<const std::uint8_t> bytes);

/// Walks record headers from the start of an in-order stream, stopping at
/// the first implausible header. A final record cut off by the end of the
/// stream is still reported.
std::vector<TlsRecordHeader> parse_tls_records(std::span<const std::uint8_t> stream);

struct ClientHello {
    std::uint16_t legacy_version = 0;
    std::vector<std::uint16_t> cipher_suites;
    std::vector<std::uint8_t> compression_methods;
    std::vector<std::uint16_t> extension_types;
    std::vector<std::uint16_t> supported_groups;
    std::vector<std::uint8_t> ec_point_formats;
    std::vector<std::uint16_t> supported_versions;
    std::optional<std::string> server_name;
};

/// Parses a ClientHello handshake body (after the 4-byte handshake header).
std::optional<ClientHello> parse_client_hello(std::span<const std::uint8_t> body);

/// Reassembles the first handshake message from the leading handshake
/// records of a stream and parses it if it is a ClientHello.
std::optional<ClientHello> find_client_hello(std::span<const std::uint8_t> stream);

/// GREASE values (RFC 8701): 0x0a0a, 0x1a1a, ..., 0xfafa.
bool is_grease(std::uint16_t value);

/// JA3 input: "version,ciphers,extensions,groups,point_formats" with
/// '-'-joined decimal lists and GREASE values removed.
std::string ja3_string(const ClientHello& hello);

/// Lower-case hex MD5 of the JA3 string (32 characters).
std::string ja3_digest(const std::string& ja3);

/// Highest offered protocol version: supported_versions if present, else legacy_version.
std::uint16_t offered_version(const ClientHello& hello);

/// TLS features of a TCP flow, computed from the reassembled streams:
///   tls_is_tls
///   tls_{fwd,bwd}_records, tls_{fwd,bwd}_size_{min,max,mean,std}   record payload lengths
///   tls_clump_*        clump statistics over records ordered by arrival
///   tls_ch_present, tls_ch_cipher_count, tls_ch_extension_count,
///   tls_ch_sni_length, tls_ch_version
///   tls_ja3, tls_ja3_digest   (text)
/// When neither stream starts with a TLS record, tls_is_tls is 0 and every
/// other feature is undefined (empty text for the JA3 fields).
FeatureRecord tls_features(const flow::BiFlow& flow);

} // namespace netfeat::plugins

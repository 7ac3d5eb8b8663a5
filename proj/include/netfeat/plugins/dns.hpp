#pragma once

#include "netfeat/flow/biflow.hpp"
#include "netfeat/plugins/feature_record.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace netfeat::plugins {

namespace dns_type {
inline constexpr std::uint16_t a = 1;
inline constexpr std::uint16_t cname = 5;
inline constexpr std::uint16_t aaaa = 28;
} // namespace dns_type

struct DnsQuestion {
    std::string name;
    std::uint16_t type = 0;
    std::uint16_t klass = 0;
};

struct DnsResourceRecord {
    std::string name;
    std::uint16_t type = 0;
    std::uint16_t klass = 0;
    std::uint32_t ttl = 0;
    std::vector<std::uint8_t> rdata;
};

struct DnsMessage {
    std::uint16_t id = 0;
    bool is_response = false;
    std::uint8_t rcode = 0;
    std::vector<DnsQuestion> questions;
    std::vector<DnsResourceRecord> answers;
    std::vector<DnsResourceRecord> authority;
    std::vector<DnsResourceRecord> additional;
};

/// Parses one DNS message (RFC 1035 wire format, compression pointers
/// followed). Returns nullopt if any section overruns the buffer.
std::optional<DnsMessage> parse_dns_message(std::span<const std::uint8_t> bytes);

/// DNS features of a port-53 flow:
///   dns_query_count     query messages (QR=0)
///   dns_answer_count    answer records over all responses
///   dns_a_count, dns_aaaa_count, dns_cname_count
///   dns_ttl_min/max/mean over all answer records
///   dns_qname_length/digits/hyphens/dots of the first question seen
///   dns_rcode           of the first response
///   dns_malformed_count messages that failed to parse
/// Flows that are not UDP/TCP port 53 get an all-undefined record.
FeatureRecord dns_features(const flow::BiFlow& flow);

} // namespace netfeat::plugins

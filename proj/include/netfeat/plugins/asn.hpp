#pragma once

#include "netfeat/capture/ip_address.hpp"
#include "netfeat/flow/biflow.hpp"
#include "netfeat/plugins/feature_record.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace netfeat::plugins {

class AsnDatabaseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Autonomous-system record of one address. `found == false` marks a lookup miss.
struct AsnInfo {
    bool found = false;
    std::uint32_t num = 0;
    std::string code;
    std::string description;
};

/// Range index over an iptoasn-style table:
///   range_start <TAB> range_end <TAB> asn <TAB> country_code <TAB> description
/// Ranges are inclusive. Where ranges nest, the narrowest one wins.
class AsnDatabase {
public:
    AsnDatabase() = default;

    static AsnDatabase load(const std::filesystem::path& path);
    static AsnDatabase parse(std::istream& in, const std::string& origin = "<stream>");

    /// Adds a range; call build() before lookups.
    void add(const capture::IpAddress& start, const capture::IpAddress& end, AsnInfo info);
    void build();

    AsnInfo lookup(const capture::IpAddress& addr) const;
    std::size_t range_count() const { return entries_.size(); }

private:
    struct Entry {
        unsigned __int128 start;
        unsigned __int128 end;
        AsnInfo info;
    };
    struct Segment {
        unsigned __int128 start;
        unsigned __int128 end;
        std::size_t entry;
    };

    static std::vector<Segment> flatten(const std::vector<Entry>& entries, const std::vector<std::size_t>& ids);

    std::vector<Entry> entries_;
    std::vector<std::uint8_t> family_;
    std::vector<Segment> v4_;
    std::vector<Segment> v6_;
};

/// ASN records of the flow's source (initiator) and destination.
std::pair<AsnInfo, AsnInfo> asn_info(const flow::BiFlow& flow, const AsnDatabase& db);

/// asn_{src,dst}_{found,num,code,description}; num is undefined and the
/// text fields are empty on a miss.
FeatureRecord asn_features(const flow::BiFlow& flow, const AsnDatabase& db);

} // namespace netfeat::plugins

#pragma once

#include "netfeat/flow/biflow.hpp"
#include "netfeat/labeling/labels.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace netfeat::analysis {

inline constexpr std::string_view kUnlabeled = "(unlabeled)";
/// `source` value of rows pooled over all capture files.
inline constexpr std::string_view kPooled = "*";

enum class Scope : std::uint8_t { All, Forward, Backward };
inline constexpr std::array<Scope, 3> kScopes = {Scope::All, Scope::Forward, Scope::Backward};
std::string_view to_string(Scope scope);

/// Per-flow quantities restricted to one direction scope. Sizes and bytes
/// are IP lengths. Duration and IAT need two packets in the scope.
struct ScopeProfile {
    std::size_t packets = 0;
    std::uint64_t bytes = 0;
    double mean_size = 0.0;
    std::optional<double> duration_s;
    std::optional<double> mean_iat_ms;
};

/// What the analysis needs from a flow, so flows can be dropped after profiling.
struct FlowProfile {
    std::string source_file;
    std::uint8_t protocol = 0;
    bool unopened_tcp = false;
    labeling::LabelSet labels;
    std::array<ScopeProfile, 3> scopes;

    const ScopeProfile& scope(Scope s) const { return scopes[static_cast<std::size_t>(s)]; }
};

FlowProfile profile_flow(const flow::BiFlow& flow, labeling::LabelSet labels);

struct Moments {
    double mean;
    double stddev;
};

/// Aggregates of one (source, label, scope) group. Only flows with at least
/// one packet in the scope are counted; each mean/stddev (population) runs
/// over the flows where the quantity is defined, and is undefined when none is.
struct LabelStats {
    std::string source;
    std::string label;
    Scope scope = Scope::All;
    std::size_t flow_count = 0;
    std::size_t defined_duration_count = 0;
    Moments packets;
    Moments bytes;
    Moments size;
    Moments duration_s;
    Moments iat_ms;
};

/// Label of a flow on `dimension`, or "(unlabeled)".
std::string label_of(const FlowProfile& flow, std::string_view dimension);

/// Rows pooled over all files (source "*"), ordered by label then scope.
/// With `per_file`, rows per source file follow, ordered by file, label, scope.
std::vector<LabelStats> dataset_stats(const std::vector<FlowProfile>& flows, std::string_view dimension,
                                      bool per_file = false);

struct UnopenedStats {
    std::size_t unopened = 0;
    std::size_t tcp_flows = 0;
    /// unopened / tcp_flows; undefined without TCP flows.
    double ratio() const;
};

/// Per label; labels without TCP flows are listed with zero counts.
std::map<std::string, UnopenedStats> unopened_tcp(const std::vector<FlowProfile>& flows, std::string_view dimension);

/// TCP, UDP, ICMP, ICMPv6, IGMP or other.
std::string_view protocol_name(std::uint8_t protocol);

using ProtocolDistribution = std::map<std::string, std::map<std::string, std::size_t>>;
ProtocolDistribution protocol_distribution(const std::vector<FlowProfile>& flows, std::string_view dimension);

/// CSV reports; undefined values are empty fields.
///   label_stats.csv:  source,label,scope,flow_count,defined_duration_count,
///                     {packets,bytes,size,duration_s,iat_ms}_{mean,std}
///   protocols.csv:    label,protocol,flows
///   unopened_tcp.csv: label,unopened,tcp_flows,ratio
void write_label_stats_csv(std::ostream& out, const std::vector<LabelStats>& stats);
void write_protocol_csv(std::ostream& out, const ProtocolDistribution& dist);
void write_unopened_csv(std::ostream& out, const std::map<std::string, UnopenedStats>& unopened);

/// Fixed-width text tables of the same three reports.
void write_text_summary(std::ostream& out, const std::vector<LabelStats>& stats, const ProtocolDistribution& dist,
                        const std::map<std::string, UnopenedStats>& unopened);

} // namespace netfeat::analysis

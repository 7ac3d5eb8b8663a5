#include "netfeat/analysis/dataset_stats.hpp"

#include "netfeat/plugins/feature_record.hpp"
#include "netfeat/plugins/stats.hpp"
#include "netfeat/util/csv.hpp"

#include <cstdio>
#include <tuple>

namespace netfeat::analysis {

using plugins::format_number;
using plugins::kUndefined;

std::string_view to_string(Scope scope)
{
    switch (scope) {
    case Scope::All: return "all";
    case Scope::Forward: return "fwd";
    case Scope::Backward: return "bwd";
    }
    return "?";
}

FlowProfile profile_flow(const flow::BiFlow& flow, labeling::LabelSet labels)
{
    FlowProfile p;
    p.source_file = flow.source_file;
    p.protocol = flow.protocol();
    p.unopened_tcp = flow.unopened_tcp();
    p.labels = std::move(labels);

    for (Scope scope : kScopes) {
        ScopeProfile& sp = p.scopes[static_cast<std::size_t>(scope)];
        double first = 0.0;
        double last = 0.0;
        for (const auto& pkt : flow.packets) {
            if (scope == Scope::Forward && pkt.direction != flow::Direction::Forward)
                continue;
            if (scope == Scope::Backward && pkt.direction != flow::Direction::Backward)
                continue;
            if (sp.packets == 0)
                first = pkt.rel_time;
            last = pkt.rel_time;
            ++sp.packets;
            sp.bytes += pkt.ip_size;
        }
        if (sp.packets > 0)
            sp.mean_size = static_cast<double>(sp.bytes) / static_cast<double>(sp.packets);
        if (sp.packets >= 2) {
            sp.duration_s = last - first;
            sp.mean_iat_ms = (last - first) * 1000.0 / static_cast<double>(sp.packets - 1);
        }
    }
    return p;
}

std::string label_of(const FlowProfile& flow, std::string_view dimension)
{
    if (auto token = flow.labels.get(dimension))
        return *token;
    return std::string(kUnlabeled);
}

namespace {

Moments moments(const std::vector<double>& values)
{
    const auto s = plugins::summarize(values);
    return {s.mean, s.stddev};
}

struct Group {
    std::size_t flow_count = 0;
    std::vector<double> packets, bytes, size, duration, iat;
};

using GroupKey = std::tuple<std::string, std::string, Scope>; // source, label, scope

void add(std::map<GroupKey, Group>& groups, const GroupKey& key, const ScopeProfile& sp)
{
    Group& g = groups[key];
    ++g.flow_count;
    g.packets.push_back(static_cast<double>(sp.packets));
    g.bytes.push_back(static_cast<double>(sp.bytes));
    g.size.push_back(sp.mean_size);
    if (sp.duration_s)
        g.duration.push_back(*sp.duration_s);
    if (sp.mean_iat_ms)
        g.iat.push_back(*sp.mean_iat_ms);
}

void emit(std::vector<LabelStats>& out, const std::map<GroupKey, Group>& groups)
{
    for (const auto& [key, g] : groups) {
        LabelStats s;
        std::tie(s.source, s.label, s.scope) = key;
        s.flow_count = g.flow_count;
        s.defined_duration_count = g.duration.size();
        s.packets = moments(g.packets);
        s.bytes = moments(g.bytes);
        s.size = moments(g.size);
        s.duration_s = moments(g.duration);
        s.iat_ms = moments(g.iat);
        out.push_back(std::move(s));
    }
}

} // namespace

std::vector<LabelStats> dataset_stats(const std::vector<FlowProfile>& flows, std::string_view dimension, bool per_file)
{
    std::map<GroupKey, Group> pooled;
    std::map<GroupKey, Group> by_file;
    for (const FlowProfile& f : flows) {
        const std::string label = label_of(f, dimension);
        for (Scope scope : kScopes) {
            const ScopeProfile& sp = f.scope(scope);
            if (sp.packets == 0)
                continue;
            add(pooled, {std::string(kPooled), label, scope}, sp);
            if (per_file)
                add(by_file, {f.source_file, label, scope}, sp);
        }
    }
    std::vector<LabelStats> out;
    emit(out, pooled);
    emit(out, by_file);
    return out;
}

double UnopenedStats::ratio() const
{
    return tcp_flows == 0 ? kUndefined : static_cast<double>(unopened) / static_cast<double>(tcp_flows);
}

std::map<std::string, UnopenedStats> unopened_tcp(const std::vector<FlowProfile>& flows, std::string_view dimension)
{
    std::map<std::string, UnopenedStats> out;
    for (const FlowProfile& f : flows) {
        UnopenedStats& s = out[label_of(f, dimension)];
        if (f.protocol != capture::ip_proto::tcp)
            continue;
        ++s.tcp_flows;
        if (f.unopened_tcp)
            ++s.unopened;
    }
    return out;
}

std::string_view protocol_name(std::uint8_t protocol)
{
    switch (protocol) {
    case capture::ip_proto::tcp: return "TCP";
    case capture::ip_proto::udp: return "UDP";
    case capture::ip_proto::icmp: return "ICMP";
    case capture::ip_proto::icmpv6: return "ICMPv6";
    case capture::ip_proto::igmp: return "IGMP";
    default: return "other";
    }
}

ProtocolDistribution protocol_distribution(const std::vector<FlowProfile>& flows, std::string_view dimension)
{
    ProtocolDistribution out;
    for (const FlowProfile& f : flows)
        ++out[label_of(f, dimension)][std::string(protocol_name(f.protocol))];
    return out;
}

void write_label_stats_csv(std::ostream& out, const std::vector<LabelStats>& stats)
{
    util::write_csv_row(out, {"source", "label", "scope", "flow_count", "defined_duration_count", "packets_mean",
                              "packets_std", "bytes_mean", "bytes_std", "size_mean", "size_std", "duration_s_mean",
                              "duration_s_std", "iat_ms_mean", "iat_ms_std"});
    for (const LabelStats& s : stats) {
        std::vector<std::string> row = {s.source, s.label, std::string(to_string(s.scope)),
                                        std::to_string(s.flow_count), std::to_string(s.defined_duration_count)};
        for (const Moments& m : {s.packets, s.bytes, s.size, s.duration_s, s.iat_ms}) {
            row.push_back(format_number(m.mean));
            row.push_back(format_number(m.stddev));
        }
        util::write_csv_row(out, row);
    }
}

void write_protocol_csv(std::ostream& out, const ProtocolDistribution& dist)
{
    util::write_csv_row(out, {"label", "protocol", "flows"});
    for (const auto& [label, counts] : dist)
        for (const auto& [proto, n] : counts)
            util::write_csv_row(out, {label, proto, std::to_string(n)});
}

void write_unopened_csv(std::ostream& out, const std::map<std::string, UnopenedStats>& unopened)
{
    util::write_csv_row(out, {"label", "unopened", "tcp_flows", "ratio"});
    for (const auto& [label, s] : unopened)
        util::write_csv_row(out, {label, std::to_string(s.unopened), std::to_string(s.tcp_flows),
                                  format_number(s.ratio())});
}

namespace {

std::string fixed(double v, int precision = 3)
{
    if (plugins::is_undefined(v))
        return "-";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

void row(std::ostream& out, const std::vector<std::string>& cells, const std::vector<std::size_t>& widths)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::string cell = cells[i];
        if (cell.size() < widths[i])
            cell.append(widths[i] - cell.size(), ' ');
        out << cell << (i + 1 < cells.size() ? "  " : "");
    }
    out << '\n';
}

void table(std::ostream& out, const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> widths;
    for (const auto& r : rows) {
        widths.resize(std::max(widths.size(), r.size()), 0);
        for (std::size_t i = 0; i < r.size(); ++i)
            widths[i] = std::max(widths[i], r[i].size());
    }
    for (const auto& r : rows)
        row(out, r, widths);
}

} // namespace

void write_text_summary(std::ostream& out, const std::vector<LabelStats>& stats, const ProtocolDistribution& dist,
                        const std::map<std::string, UnopenedStats>& unopened)
{
    out << "Per-label flow statistics (mean +/- std; source * = all files)\n";
    std::vector<std::vector<std::string>> rows = {
        {"source", "label", "scope", "flows", "dur_n", "packets", "bytes", "size", "duration_s", "iat_ms"}};
    for (const LabelStats& s : stats) {
        const auto pm = [](const Moments& m) { return fixed(m.mean) + " +/- " + fixed(m.stddev); };
        rows.push_back({s.source, s.label, std::string(to_string(s.scope)), std::to_string(s.flow_count),
                        std::to_string(s.defined_duration_count), pm(s.packets), pm(s.bytes), pm(s.size),
                        pm(s.duration_s), pm(s.iat_ms)});
    }
    table(out, rows);

    out << "\nProtocol distribution (flows)\n";
    rows = {{"label", "protocol", "flows"}};
    for (const auto& [label, counts] : dist)
        for (const auto& [proto, n] : counts)
            rows.push_back({label, proto, std::to_string(n)});
    table(out, rows);

    out << "\nUnopened TCP sessions\n";
    rows = {{"label", "unopened", "tcp_flows", "ratio"}};
    for (const auto& [label, s] : unopened)
        rows.push_back({label, std::to_string(s.unopened), std::to_string(s.tcp_flows), fixed(s.ratio(), 4)});
    table(out, rows);
}

} // namespace netfeat::analysis

#include "netfeat/plugins/asn.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

namespace netfeat::plugins {

using capture::IpAddress;

namespace {

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

} // namespace

AsnDatabase AsnDatabase::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw AsnDatabaseError("cannot open ASN database: " + path.string());
    return parse(in, path.string());
}

AsnDatabase AsnDatabase::parse(std::istream& in, const std::string& origin)
{
    AsnDatabase db;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line.front() == '#')
            continue;
        const auto cols = split_tabs(line);
        const auto where = origin + ":" + std::to_string(line_no);
        if (cols.size() < 4)
            throw AsnDatabaseError(where + ": expected at least 4 tab-separated columns");
        const auto start = IpAddress::parse(cols[0]);
        const auto end = IpAddress::parse(cols[1]);
        if (!start || !end || start->version != end->version)
            throw AsnDatabaseError(where + ": invalid address range");
        AsnInfo info;
        info.found = true;
        try {
            info.num = static_cast<std::uint32_t>(std::stoul(cols[2]));
        } catch (const std::exception&) {
            throw AsnDatabaseError(where + ": invalid AS number '" + cols[2] + "'");
        }
        info.code = cols[3];
        info.description = cols.size() > 4 ? cols[4] : std::string();
        db.add(*start, *end, std::move(info));
    }
    db.build();
    return db;
}

void AsnDatabase::add(const IpAddress& start, const IpAddress& end, AsnInfo info)
{
    info.found = true;
    unsigned __int128 lo = start.to_integer();
    unsigned __int128 hi = end.to_integer();
    if (hi < lo)
        std::swap(lo, hi);
    entries_.push_back({lo, hi, std::move(info)});
    family_.push_back(start.version);
}

std::vector<AsnDatabase::Segment> AsnDatabase::flatten(const std::vector<Entry>& entries,
                                                       const std::vector<std::size_t>& ids)
{
    // Sweep over range boundaries; within each elementary interval the
    // narrowest covering range wins (earliest added on ties).
    struct Event {
        unsigned __int128 at;
        bool open;
        std::size_t id;
    };
    std::vector<Event> events;
    constexpr auto kMax = ~static_cast<unsigned __int128>(0);
    for (std::size_t id : ids) {
        events.push_back({entries[id].start, true, id});
        if (entries[id].end != kMax)
            events.push_back({entries[id].end + 1, false, id});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.at < b.at; });

    std::set<std::tuple<unsigned __int128, std::size_t>> active; // (width, id)
    std::vector<Segment> segments;
    std::optional<Segment> open;
    for (std::size_t i = 0; i < events.size();) {
        const unsigned __int128 at = events[i].at;
        for (; i < events.size() && events[i].at == at; ++i) {
            const Entry& e = entries[events[i].id];
            const auto key = std::make_tuple(e.end - e.start, events[i].id);
            if (events[i].open)
                active.insert(key);
            else
                active.erase(key);
        }
        if (open) {
            open->end = at - 1;
            segments.push_back(*open);
            open.reset();
        }
        if (!active.empty())
            open = Segment{at, kMax, std::get<1>(*active.begin())};
    }
    if (open)
        segments.push_back(*open);

    std::vector<Segment> merged;
    for (const Segment& seg : segments) {
        if (!merged.empty() && merged.back().entry == seg.entry && merged.back().end + 1 == seg.start)
            merged.back().end = seg.end;
        else
            merged.push_back(seg);
    }
    return merged;
}

void AsnDatabase::build()
{
    std::vector<std::size_t> v4;
    std::vector<std::size_t> v6;
    for (std::size_t i = 0; i < entries_.size(); ++i)
        (family_[i] == 4 ? v4 : v6).push_back(i);
    v4_ = flatten(entries_, v4);
    v6_ = flatten(entries_, v6);
}

AsnInfo AsnDatabase::lookup(const IpAddress& addr) const
{
    const auto& segments = addr.version == 4 ? v4_ : v6_;
    const unsigned __int128 value = addr.to_integer();
    auto it = std::upper_bound(segments.begin(), segments.end(), value,
                               [](unsigned __int128 v, const Segment& s) { return v < s.start; });
    if (it == segments.begin())
        return {};
    --it;
    if (value > it->end)
        return {};
    return entries_[it->entry].info;
}

std::pair<AsnInfo, AsnInfo> asn_info(const flow::BiFlow& flow, const AsnDatabase& db)
{
    return {db.lookup(flow.src_ip()), db.lookup(flow.dst_ip())};
}

FeatureRecord asn_features(const flow::BiFlow& flow, const AsnDatabase& db)
{
    const auto [src, dst] = asn_info(flow, db);
    FeatureRecord rec;
    rec.plugin = "asn_info";
    for (const auto& [side, info] : {std::pair<const char*, const AsnInfo*>{"src", &src}, {"dst", &dst}}) {
        const std::string p = std::string("asn_") + side + "_";
        rec.push(p + "found", info->found ? 1.0 : 0.0);
        rec.push(p + "num", info->found ? static_cast<double>(info->num) : kUndefined);
        rec.push(p + "code", info->code);
        rec.push(p + "description", info->description);
    }
    rec.shape = Shape::flat(rec.values.size());
    return rec;
}

} // namespace netfeat::plugins

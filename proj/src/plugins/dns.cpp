#include "netfeat/plugins/dns.hpp"

#include "netfeat/plugins/stats.hpp"

#include <algorithm>
#include <cctype>

namespace netfeat::plugins {

namespace {

class WireReader {
public:
    explicit WireReader(std::span<const std::uint8_t> buf) : buf_(buf) {}

    bool u8(std::uint8_t& out)
    {
        if (pos_ + 1 > buf_.size())
            return false;
        out = buf_[pos_++];
        return true;
    }
    bool u16(std::uint16_t& out)
    {
        if (pos_ + 2 > buf_.size())
            return false;
        out = static_cast<std::uint16_t>(buf_[pos_] << 8 | buf_[pos_ + 1]);
        pos_ += 2;
        return true;
    }
    bool u32(std::uint32_t& out)
    {
        std::uint16_t hi = 0;
        std::uint16_t lo = 0;
        if (!u16(hi) || !u16(lo))
            return false;
        out = std::uint32_t(hi) << 16 | lo;
        return true;
    }
    bool bytes(std::size_t n, std::vector<std::uint8_t>& out)
    {
        if (pos_ + n > buf_.size())
            return false;
        out.assign(buf_.begin() + static_cast<std::ptrdiff_t>(pos_),
                   buf_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return true;
    }

    // Reads a possibly compressed domain name; the cursor ends after the
    // name's in-place encoding.
    bool name(std::string& out)
    {
        out.clear();
        std::size_t cursor = pos_;
        std::optional<std::size_t> resume;
        int jumps = 0;
        std::size_t wire_length = 0;
        for (;;) {
            if (cursor >= buf_.size())
                return false;
            const std::uint8_t len = buf_[cursor];
            if ((len & 0xc0) == 0xc0) {
                if (cursor + 1 >= buf_.size() || ++jumps > 64)
                    return false;
                const std::size_t target = std::size_t(len & 0x3f) << 8 | buf_[cursor + 1];
                if (!resume)
                    resume = cursor + 2;
                cursor = target;
                continue;
            }
            if ((len & 0xc0) != 0)
                return false;
            if (len == 0) {
                ++cursor;
                break;
            }
            if (cursor + 1 + len > buf_.size())
                return false;
            wire_length += len + 1u;
            if (wire_length > 255)
                return false;
            if (!out.empty())
                out += '.';
            out.append(reinterpret_cast<const char*>(buf_.data() + cursor + 1), len);
            cursor += 1u + len;
        }
        pos_ = resume ? *resume : cursor;
        return true;
    }

private:
    std::span<const std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

bool read_records(WireReader& r, std::uint16_t count, std::vector<DnsResourceRecord>& out)
{
    for (std::uint16_t i = 0; i < count; ++i) {
        DnsResourceRecord rr;
        std::uint16_t rdlength = 0;
        if (!r.name(rr.name) || !r.u16(rr.type) || !r.u16(rr.klass) || !r.u32(rr.ttl) || !r.u16(rdlength) ||
            !r.bytes(rdlength, rr.rdata))
            return false;
        out.push_back(std::move(rr));
    }
    return true;
}

bool is_dns_flow(const flow::BiFlow& flow)
{
    const auto proto = flow.key.protocol;
    return (proto == capture::ip_proto::udp || proto == capture::ip_proto::tcp) &&
           (flow.key.port_lo == 53 || flow.key.port_hi == 53);
}

const char* const kDnsFeatureNames[] = {
    "dns_query_count", "dns_answer_count", "dns_a_count",         "dns_aaaa_count",   "dns_cname_count",
    "dns_ttl_min",     "dns_ttl_max",      "dns_ttl_mean",        "dns_qname_length", "dns_qname_digits",
    "dns_qname_hyphens", "dns_qname_dots", "dns_rcode",           "dns_malformed_count"};

} // namespace

std::optional<DnsMessage> parse_dns_message(std::span<const std::uint8_t> bytes)
{
    WireReader r(bytes);
    DnsMessage msg;
    std::uint16_t flags = 0;
    std::uint16_t qd = 0;
    std::uint16_t an = 0;
    std::uint16_t ns = 0;
    std::uint16_t ar = 0;
    if (!r.u16(msg.id) || !r.u16(flags) || !r.u16(qd) || !r.u16(an) || !r.u16(ns) || !r.u16(ar))
        return std::nullopt;
    msg.is_response = (flags & 0x8000) != 0;
    msg.rcode = static_cast<std::uint8_t>(flags & 0x000f);
    for (std::uint16_t i = 0; i < qd; ++i) {
        DnsQuestion q;
        if (!r.name(q.name) || !r.u16(q.type) || !r.u16(q.klass))
            return std::nullopt;
        msg.questions.push_back(std::move(q));
    }
    if (!read_records(r, an, msg.answers) || !read_records(r, ns, msg.authority) ||
        !read_records(r, ar, msg.additional))
        return std::nullopt;
    return msg;
}

FeatureRecord dns_features(const flow::BiFlow& flow)
{
    FeatureRecord rec;
    rec.plugin = "dns";
    rec.shape = Shape::flat(std::size(kDnsFeatureNames));
    if (!is_dns_flow(flow)) {
        for (const char* name : kDnsFeatureNames)
            rec.push(name, kUndefined);
        return rec;
    }

    double queries = 0;
    double answers = 0;
    double a = 0;
    double aaaa = 0;
    double cname = 0;
    double malformed = 0;
    double rcode = kUndefined;
    std::vector<double> ttls;
    std::optional<std::string> qname;

    for (const auto& payload : flow.dns_payloads) {
        const auto msg = parse_dns_message(payload);
        if (!msg) {
            ++malformed;
            continue;
        }
        if (!qname && !msg->questions.empty())
            qname = msg->questions.front().name;
        if (!msg->is_response) {
            ++queries;
            continue;
        }
        if (is_undefined(rcode))
            rcode = msg->rcode;
        for (const auto& rr : msg->answers) {
            ++answers;
            a += rr.type == dns_type::a;
            aaaa += rr.type == dns_type::aaaa;
            cname += rr.type == dns_type::cname;
            ttls.push_back(static_cast<double>(rr.ttl));
        }
    }

    const Summary ttl = summarize(ttls);
    double length = kUndefined;
    double digits = kUndefined;
    double hyphens = kUndefined;
    double dots = kUndefined;
    if (qname) {
        length = static_cast<double>(qname->size());
        digits = static_cast<double>(std::count_if(qname->begin(), qname->end(),
                                                   [](unsigned char c) { return std::isdigit(c) != 0; }));
        hyphens = static_cast<double>(std::count(qname->begin(), qname->end(), '-'));
        dots = static_cast<double>(std::count(qname->begin(), qname->end(), '.'));
    }

    const double values[] = {queries, answers, a,      aaaa,    cname, ttl.min,  ttl.max,
                              ttl.mean, length, digits, hyphens, dots,  rcode,   malformed};
    for (std::size_t i = 0; i < std::size(kDnsFeatureNames); ++i)
        rec.push(kDnsFeatureNames[i], values[i]);
    return rec;
}

} // namespace netfeat::plugins

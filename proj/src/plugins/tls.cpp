#include "netfeat/plugins/tls.hpp"

#include "netfeat/plugins/clumps.hpp"
#include "netfeat/plugins/stats.hpp"
#include "netfeat/util/hash.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace netfeat::plugins {

namespace {

constexpr std::size_t kMaxRecordLength = (1u << 14) + 2048;
constexpr std::uint8_t kHandshakeClientHello = 1;

constexpr std::uint16_t kExtServerName = 0;
constexpr std::uint16_t kExtSupportedGroups = 10;
constexpr std::uint16_t kExtEcPointFormats = 11;
constexpr std::uint16_t kExtSupportedVersions = 43;

class Cursor {
public:
    explicit Cursor(std::span<const std::uint8_t> buf) : buf_(buf) {}

    bool u8(std::uint8_t& v)
    {
        if (left() < 1)
            return false;
        v = buf_[pos_++];
        return true;
    }
    bool u16(std::uint16_t& v)
    {
        if (left() < 2)
            return false;
        v = static_cast<std::uint16_t>(buf_[pos_] << 8 | buf_[pos_ + 1]);
        pos_ += 2;
        return true;
    }
    bool u24(std::uint32_t& v)
    {
        if (left() < 3)
            return false;
        v = std::uint32_t(buf_[pos_]) << 16 | std::uint32_t(buf_[pos_ + 1]) << 8 | buf_[pos_ + 2];
        pos_ += 3;
        return true;
    }
    bool take(std::size_t n, std::span<const std::uint8_t>& out)
    {
        if (left() < n)
            return false;
        out = buf_.subspan(pos_, n);
        pos_ += n;
        return true;
    }
    std::size_t left() const { return buf_.size() - pos_; }

private:
    std::span<const std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

std::vector<std::uint16_t> u16_list(std::span<const std::uint8_t> bytes)
{
    std::vector<std::uint16_t> out;
    for (std::size_t i = 0; i + 1 < bytes.size(); i += 2)
        out.push_back(static_cast<std::uint16_t>(bytes[i] << 8 | bytes[i + 1]));
    return out;
}

void parse_extension(ClientHello& hello, std::uint16_t type, std::span<const std::uint8_t> data)
{
    Cursor c(data);
    if (type == kExtServerName) {
        std::uint16_t list_len = 0;
        if (!c.u16(list_len))
            return;
        while (c.left() >= 3) {
            std::uint8_t name_type = 0;
            std::uint16_t len = 0;
            std::span<const std::uint8_t> name;
            if (!c.u8(name_type) || !c.u16(len) || !c.take(len, name))
                return;
            if (name_type == 0) {
                hello.server_name = std::string(name.begin(), name.end());
                return;
            }
        }
    } else if (type == kExtSupportedGroups) {
        std::uint16_t len = 0;
        std::span<const std::uint8_t> list;
        if (c.u16(len) && c.take(len, list))
            hello.supported_groups = u16_list(list);
    } else if (type == kExtEcPointFormats) {
        std::uint8_t len = 0;
        std::span<const std::uint8_t> list;
        if (c.u8(len) && c.take(len, list))
            hello.ec_point_formats.assign(list.begin(), list.end());
    } else if (type == kExtSupportedVersions) {
        std::uint8_t len = 0;
        std::span<const std::uint8_t> list;
        if (c.u8(len) && c.take(len, list))
            hello.supported_versions = u16_list(list);
    }
}

template <typename T>
std::string join_decimal(const std::vector<T>& values, bool drop_grease)
{
    std::string out;
    for (T v : values) {
        if (drop_grease && is_grease(v))
            continue;
        if (!out.empty())
            out += '-';
        out += std::to_string(v);
    }
    return out;
}

void push_size_stats(FeatureRecord& rec, const std::string& prefix, const std::vector<double>& sizes)
{
    const Summary s = summarize(sizes);
    rec.push(prefix + "_records", static_cast<double>(sizes.size()));
    rec.push(prefix + "_size_min", s.min);
    rec.push(prefix + "_size_max", s.max);
    rec.push(prefix + "_size_mean", s.mean);
    rec.push(prefix + "_size_std", s.stddev);
}

} // namespace

bool plausible_tls_header(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 5)
        return false;
    const std::uint8_t type = bytes[0];
    const std::size_t length = std::size_t(bytes[3]) << 8 | bytes[4];
    return type >= tls_content::change_cipher_spec && type <= tls_content::heartbeat && bytes[1] == 3 &&
           bytes[2] <= 4 && length >= 1 && length <= kMaxRecordLength;
}

std::vector<TlsRecordHeader> parse_tls_records(std::span<const std::uint8_t> stream)
{
    std::vector<TlsRecordHeader> out;
    std::size_t pos = 0;
    while (pos + 5 <= stream.size() && plausible_tls_header(stream.subspan(pos))) {
        TlsRecordHeader h;
        h.offset = pos;
        h.content_type = stream[pos];
        h.version = static_cast<std::uint16_t>(stream[pos + 1] << 8 | stream[pos + 2]);
        h.length = static_cast<std::uint16_t>(stream[pos + 3] << 8 | stream[pos + 4]);
        out.push_back(h);
        pos += 5 + std::size_t(h.length);
    }
    return out;
}

std::optional<ClientHello> parse_client_hello(std::span<const std::uint8_t> body)
{
    Cursor c(body);
    ClientHello hello;
    std::span<const std::uint8_t> skip;
    std::uint8_t sid_len = 0;
    std::uint16_t cs_len = 0;
    std::uint8_t comp_len = 0;
    std::span<const std::uint8_t> suites;
    std::span<const std::uint8_t> comp;
    if (!c.u16(hello.legacy_version) || !c.take(32, skip) || !c.u8(sid_len) || !c.take(sid_len, skip) ||
        !c.u16(cs_len) || cs_len % 2 != 0 || !c.take(cs_len, suites) || !c.u8(comp_len) || !c.take(comp_len, comp))
        return std::nullopt;
    hello.cipher_suites = u16_list(suites);
    hello.compression_methods.assign(comp.begin(), comp.end());

    if (c.left() == 0)
        return hello;
    std::uint16_t ext_len = 0;
    std::span<const std::uint8_t> exts;
    if (!c.u16(ext_len) || !c.take(ext_len, exts))
        return std::nullopt;
    Cursor e(exts);
    while (e.left() > 0) {
        std::uint16_t type = 0;
        std::uint16_t len = 0;
        std::span<const std::uint8_t> data;
        if (!e.u16(type) || !e.u16(len) || !e.take(len, data))
            return std::nullopt;
        hello.extension_types.push_back(type);
        parse_extension(hello, type, data);
    }
    return hello;
}

std::optional<ClientHello> find_client_hello(std::span<const std::uint8_t> stream)
{
    std::vector<std::uint8_t> message;
    for (const TlsRecordHeader& rec : parse_tls_records(stream)) {
        if (rec.content_type != tls_content::handshake)
            break;
        const std::size_t begin = rec.offset + 5;
        const std::size_t end = std::min(stream.size(), begin + rec.length);
        message.insert(message.end(), stream.begin() + static_cast<std::ptrdiff_t>(begin),
                       stream.begin() + static_cast<std::ptrdiff_t>(end));
        if (message.size() >= 4) {
            if (message[0] != kHandshakeClientHello)
                return std::nullopt;
            Cursor c(message);
            std::uint8_t type = 0;
            std::uint32_t len = 0;
            c.u8(type);
            c.u24(len);
            if (message.size() >= 4 + std::size_t(len))
                return parse_client_hello(std::span<const std::uint8_t>(message).subspan(4, len));
        }
    }
    return std::nullopt;
}

bool is_grease(std::uint16_t value) { return (value & 0x0f0f) == 0x0a0a && (value >> 8) == (value & 0xff); }

std::string ja3_string(const ClientHello& hello)
{
    return std::to_string(hello.legacy_version) + "," + join_decimal(hello.cipher_suites, true) + "," +
           join_decimal(hello.extension_types, true) + "," + join_decimal(hello.supported_groups, true) + "," +
           join_decimal(hello.ec_point_formats, false);
}

std::string ja3_digest(const std::string& ja3) { return util::md5_hex(ja3); }

std::uint16_t offered_version(const ClientHello& hello)
{
    std::uint16_t best = 0;
    for (auto v : hello.supported_versions)
        if (!is_grease(v))
            best = std::max(best, v);
    return best != 0 ? best : hello.legacy_version;
}

FeatureRecord tls_features(const flow::BiFlow& flow)
{
    FeatureRecord rec;
    rec.plugin = "tls";

    const bool tcp = flow.key.protocol == capture::ip_proto::tcp;
    const bool fwd_tls = tcp && plausible_tls_header(flow.tls_stream_fwd.bytes);
    const bool bwd_tls = tcp && plausible_tls_header(flow.tls_stream_bwd.bytes);
    const bool is_tls = fwd_tls || bwd_tls;

    std::vector<TlsRecordHeader> fwd_records;
    std::vector<TlsRecordHeader> bwd_records;
    if (fwd_tls)
        fwd_records = parse_tls_records(flow.tls_stream_fwd.bytes);
    if (bwd_tls)
        bwd_records = parse_tls_records(flow.tls_stream_bwd.bytes);

    struct Item {
        double time;
        int dir;
        std::size_t offset;
        double length;
    };
    std::vector<Item> ordered;
    std::vector<double> fwd_sizes;
    std::vector<double> bwd_sizes;
    for (const auto& r : fwd_records) {
        fwd_sizes.push_back(r.length);
        ordered.push_back({flow.tls_stream_fwd.time_at(r.offset), 0, r.offset, double(r.length)});
    }
    for (const auto& r : bwd_records) {
        bwd_sizes.push_back(r.length);
        ordered.push_back({flow.tls_stream_bwd.time_at(r.offset), 1, r.offset, double(r.length)});
    }
    std::sort(ordered.begin(), ordered.end(), [](const Item& a, const Item& b) {
        return std::tie(a.time, a.dir, a.offset) < std::tie(b.time, b.dir, b.offset);
    });
    std::vector<ClumpItem> items;
    for (const Item& it : ordered)
        items.push_back({it.dir == 0 ? flow::Direction::Forward : flow::Direction::Backward, it.length, it.time});

    rec.push("tls_is_tls", is_tls ? 1.0 : 0.0);
    push_size_stats(rec, "tls_fwd", fwd_sizes);
    push_size_stats(rec, "tls_bwd", bwd_sizes);
    const FeatureRecord clump = clump_features(items, "tls_clump");
    for (std::size_t i = 0; i < clump.size(); ++i)
        rec.push(clump.names[i], clump.number(i));

    const auto hello = fwd_tls ? find_client_hello(flow.tls_stream_fwd.bytes) : std::nullopt;
    rec.push("tls_ch_present", hello ? 1.0 : 0.0);
    rec.push("tls_ch_cipher_count", hello ? double(hello->cipher_suites.size()) : kUndefined);
    rec.push("tls_ch_extension_count", hello ? double(hello->extension_types.size()) : kUndefined);
    rec.push("tls_ch_sni_length", hello ? double(hello->server_name.value_or("").size()) : kUndefined);
    rec.push("tls_ch_version", hello ? double(offered_version(*hello)) : kUndefined);
    const std::string ja3 = hello ? ja3_string(*hello) : std::string();
    rec.push("tls_ja3", ja3);
    rec.push("tls_ja3_digest", hello ? ja3_digest(ja3) : std::string());

    if (!is_tls) {
        for (std::size_t i = 1; i < rec.values.size(); ++i)
            if (std::holds_alternative<double>(rec.values[i]))
                rec.values[i] = kUndefined;
    }
    rec.shape = Shape::flat(rec.values.size());
    return rec;
}

} // namespace netfeat::plugins

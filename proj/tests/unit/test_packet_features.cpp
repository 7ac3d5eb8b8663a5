#include "oracles.hpp"
#include "synthetic.hpp"

#include "netfeat/plugins/packet_features.hpp"
#include "netfeat/plugins/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace netfeat;
using namespace netfeat::plugins;
using namespace netfeat::testing;
using flow::Direction;

namespace {

std::vector<double> payload_concat(const flow::BiFlow& f)
{
    std::vector<double> out;
    for (const auto& p : f.packets)
        for (auto b : p.payload)
            out.push_back(b);
    return out;
}

} // namespace

TEST(Stats, SummaryAndMedian)
{
    const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
    const Summary s = summarize(v);
    EXPECT_EQ(s.count, 8u);
    EXPECT_EQ(s.min, 2);
    EXPECT_EQ(s.max, 9);
    EXPECT_DOUBLE_EQ(s.mean, 5);
    EXPECT_DOUBLE_EQ(s.stddev, 2); // population stddev
    EXPECT_DOUBLE_EQ(median(v), 4.5);
    EXPECT_TRUE(is_undefined(summarize({}).mean));
    EXPECT_EQ(summarize(std::vector<double>{3}).stddev, 0.0);
    EXPECT_TRUE(is_undefined(median({})));
}

TEST(FeatureRecord, FormatAndDenseAppend)
{
    EXPECT_EQ(format_number(kUndefined), "");
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(784), "784");

    FeatureRecord part;
    part.push("a", 1.0);
    part.push("b", kUndefined);
    part.shape = Shape::flat(2);
    FeatureRecord into;
    append_dense(into, part);
    EXPECT_EQ(into.numbers(), (std::vector<double>{1.0, 0.0}));
    EXPECT_TRUE(into.well_formed());
    EXPECT_EQ(into.find("b"), 1u);
    EXPECT_EQ(Shape::matrix(5, 14).element_count(), 70u);
}

TEST(NBytes, PadsTruncatesAndConcatenatesInArrivalOrder)
{
    const auto one = FlowBuilder().fwd(0, bytes_of("abc")).build();
    EXPECT_EQ(n_bytes(one, 5).numbers(), (std::vector<double>{97, 98, 99, 0, 0}));

    const auto two = FlowBuilder().fwd(0, Bytes{1, 2}).bwd(0.1, Bytes{3}).build();
    EXPECT_EQ(n_bytes(two, 3).numbers(), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(n_bytes(two, 2).numbers(), (std::vector<double>{1, 2}));

    const auto empty = FlowBuilder().fwd(0).bwd(1).build();
    const auto rec = n_bytes(empty, 784);
    EXPECT_EQ(rec.size(), 784u);
    EXPECT_TRUE(std::all_of(rec.values.begin(), rec.values.end(), [](const auto& v) { return std::get<double>(v) == 0; }));
}

TEST(NBytes, MatchesConcatenationOracle)
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const auto f = random_flow(rng, {.min_packets = 10, .max_packets = 10, .max_payload = 150});
        auto expect = payload_concat(f);
        expect.resize(784, 0.0);
        const auto rec = n_bytes(f, 784);
        EXPECT_EQ(rec.numbers(), expect);
        EXPECT_EQ(rec.shape.element_count(), rec.size());
    }
}

TEST(ByteFrequency, Examples)
{
    const auto f = FlowBuilder().fwd(0, Bytes{0, 0, 7}).build();
    const auto rec = byte_frequency(f, 6);
    ASSERT_EQ(rec.size(), 512u);
    EXPECT_EQ(rec.number(0), 2);
    EXPECT_EQ(rec.number(7), 1);
    for (std::size_t i = 256; i < 512; ++i)
        EXPECT_EQ(rec.number(i), 0);

    // Empty packets count toward P: the third packet is beyond P=2.
    const auto g = FlowBuilder().fwd(0).bwd(0.1).fwd(0.2, Bytes{9}).build();
    const auto none = byte_frequency(g, 2).numbers();
    EXPECT_EQ(std::accumulate(none.begin(), none.end(), 0.0), 0.0);
}

TEST(ByteFrequency, MatchesCountingOracleAndMassLaw)
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        const auto f = random_flow(rng);
        const std::size_t P = 1 + rng() % 10;
        const auto rec = byte_frequency(f, P).numbers();
        const auto expect = oracle::byte_frequency(f, P);
        double fwd_bytes = 0, bwd_bytes = 0;
        for (std::size_t k = 0; k < f.packets.size() && k < P; ++k)
            (f.packets[k].direction == Direction::Forward ? fwd_bytes : bwd_bytes) += f.packets[k].payload_size;
        for (std::size_t j = 0; j < 512; ++j)
            ASSERT_EQ(rec[j], static_cast<double>(expect[j]));
        EXPECT_EQ(std::accumulate(rec.begin(), rec.begin() + 256, 0.0), fwd_bytes);
        EXPECT_EQ(std::accumulate(rec.begin() + 256, rec.end(), 0.0), bwd_bytes);
    }
}

TEST(SmallPacketRatio, Examples)
{
    const auto empty = FlowBuilder().fwd(0).bwd(1).fwd(2).build();
    EXPECT_EQ(small_packet_ratio(empty, 0).number("small_ratio_all"), 1.0);

    const auto mixed = FlowBuilder().fwd(0, Bytes(10)).fwd(1, Bytes(2000)).build();
    const auto rec = small_packet_ratio(mixed, 100);
    EXPECT_EQ(rec.number("small_ratio_all"), 0.5);
    EXPECT_EQ(rec.number("small_ratio_fwd"), 0.5);
    EXPECT_TRUE(is_undefined(rec.number("small_ratio_bwd")));
}

TEST(SmallPacketRatio, MatchesCountingOracle)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const auto f = random_flow(rng);
        const std::size_t thr = rng() % 300;
        std::size_t n[3] = {}, small[3] = {};
        for (const auto& p : f.packets) {
            const int d = p.direction == Direction::Forward ? 1 : 2;
            for (int s : {0, d}) {
                ++n[s];
                small[s] += p.payload.size() <= thr;
            }
        }
        const auto rec = small_packet_ratio(f, thr);
        for (int s = 0; s < 3; ++s) {
            const double expect = n[s] ? static_cast<double>(small[s]) / static_cast<double>(n[s]) : kUndefined;
            EXPECT_TRUE(oracle::close(rec.number(static_cast<std::size_t>(s)), expect));
        }
    }
}

TEST(ProtocolHeaders, PaddingAndLength)
{
    const auto f = FlowBuilder().add(Direction::Forward, 0, Bytes(12), std::nullopt, 1234).build();
    const auto rec = protocol_headers(f, 2);
    EXPECT_EQ(rec.shape, Shape::matrix(2, 4));
    EXPECT_EQ(rec.numbers(), (std::vector<double>{0, 52, 1, 1234, 0, 0, 0, 0}));
    EXPECT_EQ(protocol_headers(f, 32).size(), 128u);

    const auto udp = FlowBuilder(capture::ip_proto::udp).fwd(0).bwd(0.5).build();
    EXPECT_EQ(protocol_headers(udp, 2).numbers(), (std::vector<double>{0, 28, 1, 0, 500, 28, -1, 0}));
}

TEST(ProtocolHeaders, MatchesScriptedOracle)
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const auto f = random_flow(rng);
        const auto rec = protocol_headers(f, 20).numbers();
        for (std::size_t k = 0; k < 20; ++k) {
            std::array<double, 4> expect{};
            if (k < f.packets.size()) {
                const auto& p = f.packets[k];
                expect = {k == 0 ? 0.0 : 1000.0 * (p.rel_time - f.packets[k - 1].rel_time), double(p.ip_size),
                          p.direction == Direction::Forward ? 1.0 : -1.0, double(*p.tcp_window)};
            }
            for (std::size_t c = 0; c < 4; ++c)
                ASSERT_TRUE(oracle::close(rec[k * 4 + c], expect[c])) << k << "," << c;
        }
    }
}

TEST(PacketRelativeTime, Examples)
{
    const auto f = FlowBuilder().fwd(0).bwd(2).fwd(4).build();
    EXPECT_EQ(packet_relative_time(f).numbers(), (std::vector<double>{4, 2, 2}));
    const auto one = packet_relative_time(FlowBuilder().fwd(0).build());
    EXPECT_TRUE(is_undefined(one.number(0)));
    EXPECT_EQ(one.number(1), 0);
    EXPECT_EQ(one.number(2), 0);
}

TEST(PacketRelativeTime, MatchesOracle)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto f = random_flow(rng, {.min_packets = 2});
        std::vector<double> t;
        for (const auto& p : f.packets)
            t.push_back(p.rel_time);
        std::vector<double> sorted = t;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double med = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
        const auto rec = packet_relative_time(f);
        EXPECT_TRUE(oracle::close(rec.number(0), t.back()));
        EXPECT_TRUE(oracle::close(rec.number(1), oracle::moments(t).mean));
        EXPECT_TRUE(oracle::close(rec.number(2), med));
    }
}

TEST(ResReqDiffTime, Examples)
{
    const auto f = FlowBuilder().fwd(0).bwd(0.3).build();
    const auto rec = res_req_diff_time(f);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_DOUBLE_EQ(rec.number(i), 0.3);
    const auto fwd_only = res_req_diff_time(FlowBuilder().fwd(0).fwd(1).build());
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_TRUE(is_undefined(fwd_only.number(i)));
}

TEST(ResReqDiffTime, MatchesPairingOracle)
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 200; ++i) {
        const auto f = random_flow(rng);
        std::vector<double> gaps;
        for (std::size_t k = 0; k < f.packets.size(); ++k) {
            if (f.packets[k].direction != Direction::Backward)
                continue;
            for (std::size_t j = k; j-- > 0;) {
                if (f.packets[j].direction == Direction::Forward) {
                    gaps.push_back(f.packets[k].rel_time - f.packets[j].rel_time);
                    break;
                }
            }
        }
        const auto m = oracle::moments(gaps);
        const auto rec = res_req_diff_time(f);
        EXPECT_TRUE(oracle::close(rec.number(0), m.min));
        EXPECT_TRUE(oracle::close(rec.number(1), m.mean));
        EXPECT_TRUE(oracle::close(rec.number(2), m.max));
    }
}

TEST(DeepMal, Examples)
{
    const auto f = FlowBuilder().fwd(0, bytes_of("ab")).bwd(1, bytes_of("cdef")).build();
    const auto rec = deepmal_bytes(f, 2, 4);
    EXPECT_EQ(rec.shape, Shape::matrix(2, 4));
    EXPECT_EQ(rec.numbers(), (std::vector<double>{97, 98, 0, 0, 99, 100, 101, 102}));

    const auto one = deepmal_bytes(FlowBuilder().fwd(0, bytes_of("z")).build(), 3, 2).numbers();
    EXPECT_EQ(one, (std::vector<double>{122, 0, 0, 0, 0, 0}));
}

TEST(DeepMal, MatchesSlicingOracle)
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        const auto f = random_flow(rng);
        const std::size_t m = 1 + rng() % 30, n = 1 + rng() % 120;
        const auto rec = deepmal_bytes(f, m, n).numbers();
        ASSERT_EQ(rec.size(), m * n);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                double expect = 0;
                if (r < f.packets.size() && c < f.packets[r].payload.size())
                    expect = f.packets[r].payload[c];
                ASSERT_EQ(rec[r * n + c], expect);
            }
    }
}

TEST(PacketFeatures, PureAndShapeLaw)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 50; ++i) {
        const auto f = random_flow(rng);
        const FeatureRecord recs[] = {n_bytes(f, 100),          byte_frequency(f, 6),   small_packet_ratio(f),
                                      protocol_headers(f, 32),  packet_relative_time(f), res_req_diff_time(f),
                                      deepmal_bytes(f, 20, 100)};
        const FeatureRecord again[] = {n_bytes(f, 100),         byte_frequency(f, 6),   small_packet_ratio(f),
                                       protocol_headers(f, 32), packet_relative_time(f), res_req_diff_time(f),
                                       deepmal_bytes(f, 20, 100)};
        for (std::size_t k = 0; k < std::size(recs); ++k) {
            EXPECT_TRUE(recs[k].well_formed()) << recs[k].plugin;
            EXPECT_EQ(recs[k].shape.element_count(), recs[k].size());
            ASSERT_EQ(recs[k].size(), again[k].size());
            for (std::size_t j = 0; j < recs[k].size(); ++j)
                EXPECT_TRUE(oracle::close(recs[k].number(j), again[k].number(j), 0.0));
        }
    }
}

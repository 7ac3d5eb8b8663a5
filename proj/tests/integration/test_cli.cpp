#include "eval_fixtures.hpp"
#include "frames.hpp"
#include "synthetic.hpp"

#include "netfeat/cli/commands.hpp"
#include "netfeat/util/csv.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace netfeat;
using namespace netfeat::testing;
namespace fs = std::filesystem;
namespace tf = capture::tcp_flag;
using json = nlohmann::json;

namespace {

constexpr std::size_t kMetaColumns = 11;

PacketSpec pkt(double t, const std::string& src, std::uint16_t sport, const std::string& dst, std::uint16_t dport,
               std::uint8_t proto, std::uint8_t flags, std::string payload = {})
{
    PacketSpec s;
    s.time = t;
    s.src = src;
    s.dst = dst;
    s.sport = sport;
    s.dport = dport;
    s.protocol = proto;
    s.flags = flags;
    s.payload = bytes_of(payload);
    return s;
}

/// One TCP flow with a handshake and one UDP exchange.
std::vector<PacketSpec> two_flows()
{
    const std::string c = "10.0.0.1", s = "10.0.0.2";
    return {pkt(100.0, c, 40000, s, 443, 6, tf::syn), pkt(100.1, s, 443, c, 40000, 6, tf::syn | tf::ack),
            pkt(100.2, c, 40000, s, 443, 6, tf::ack), pkt(100.3, c, 40000, s, 443, 6, tf::ack | tf::psh, "hello"),
            pkt(100.5, c, 5353, "10.0.0.3", 53, 17, 0, "query"), pkt(100.6, "10.0.0.3", 53, c, 5353, 17, 0, "answer")};
}

std::vector<util::CsvRow> csv_of(const fs::path& p) { return util::read_csv_file(p); }

int run_cli(const std::string& args, std::string* output = nullptr)
{
    TempDir dir;
    const std::string cmd = std::string(NETFEAT_CLI_PATH) + " " + args + " > " + (dir / "out.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output)
        *output = read_file(dir / "out.txt");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

cli::PipelineConfig config_in(const fs::path& dir, const std::string& text, bool require_plugins = true)
{
    write_file(dir / "run.toml", text);
    return cli::load_pipeline_config_file(dir / "run.toml", {}, require_plugins);
}

} // namespace

TEST(CliExtract, NBytesOverTwoFlows)
{
    TempDir dir;
    write_pcap(dir / "caps" / "two.pcap", two_flows());
    const auto cfg = config_in(dir.path(), R"(
[input]
paths = [caps]
[output]
dir = out
[plugins]
list = [n_bytes]
)");
    std::ostringstream log;
    EXPECT_EQ(cli::cmd_extract(cfg, log), cli::kExitOk);
    const auto rows = csv_of(dir / "out" / "features.csv");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].size(), kMetaColumns + 784);
    EXPECT_EQ(rows[0][0], "flow_id");
    EXPECT_EQ(rows[0][kMetaColumns], "byte_0");
    for (const auto& r : rows)
        EXPECT_EQ(r.size(), rows[0].size());
    EXPECT_EQ(rows[1][1], "caps/two.pcap");
    EXPECT_EQ(rows[1][2], "10.0.0.1");
    EXPECT_EQ(rows[1][6], "6");
    EXPECT_EQ(rows[1][9], "4");
    EXPECT_EQ(rows[1][kMetaColumns], "104"); // 'h'
    EXPECT_EQ(rows[2][kMetaColumns], "113"); // 'q'
    EXPECT_EQ(rows[1][0].size(), 16u);
    EXPECT_NE(rows[1][0], rows[2][0]);

    const auto manifest = json::parse(read_file(dir / "out" / "manifest.json"));
    EXPECT_EQ(manifest["counts"]["flows"], 2);
    EXPECT_EQ(manifest["counts"]["feature_columns"], 784);
    EXPECT_EQ(manifest["inputs"][0]["status"], "ok");
    EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 64u);
}

TEST(CliExtract, ColumnCountIsSumOfPluginLengths)
{
    TempDir dir;
    write_pcap(dir / "a.pcap", two_flows());
    const auto cfg = config_in(dir.path(), R"(
[input]
paths = [a.pcap]
[output]
dir = out
[plugins]
list = [maldist, clumps, dns, tls, small, bytes]
[plugin.maldist]
type = feature_set
set = maldist
[plugin.small]
type = small_packet_ratio
threshold = 10
[plugin.bytes]
type = n_bytes
n = 16
)");
    std::ostringstream log;
    ASSERT_EQ(cli::cmd_extract(cfg, log), cli::kExitOk);
    const auto rows = csv_of(dir / "out" / "features.csv");
    std::size_t expect = 0;
    for (const char* t : {"clumps", "dns", "tls"})
        expect += plugins::make_plugin(t)->feature_names().size();
    expect += 982 + 3 + 16;
    EXPECT_EQ(rows.at(0).size(), kMetaColumns + expect);
    const auto manifest = json::parse(read_file(dir / "out" / "manifest.json"));
    EXPECT_EQ(manifest["plugins"][0]["features"], 982);
}

TEST(CliExtract, MaldistGives982FeatureColumns)
{
    TempDir dir;
    write_pcap(dir / "a.pcap", two_flows());
    const auto cfg = config_in(dir.path(), "[input]\npaths = [a.pcap]\n[output]\ndir = out\n[plugins]\nlist = [maldist]\n"
                                    "[plugin.maldist]\ntype = feature_set\nset = maldist\n");
    std::ostringstream log;
    ASSERT_EQ(cli::cmd_extract(cfg, log), cli::kExitOk);
    const auto rows = csv_of(dir / "out" / "features.csv");
    EXPECT_EQ(rows.at(0).size() - kMetaColumns, 982u);
}

TEST(CliExtract, FilenameLabelsBecomeColumns)
{
    TempDir dir;
    write_pcap(dir / "vpn_facebook_audio2.pcap", two_flows());
    const auto cfg = config_in(dir.path(), "[input]\npaths = [\"*.pcap\"]\n[labels]\nmode = filename\n[output]\ndir = out\n"
                                    "[plugins]\nlist = [packet_relative_time]\n");
    std::ostringstream log;
    ASSERT_EQ(cli::cmd_extract(cfg, log), cli::kExitOk);
    const auto rows = csv_of(dir / "out" / "features.csv");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0][kMetaColumns], "label_encapsulation");
    EXPECT_EQ(rows[0][kMetaColumns + 1], "label_app");
    EXPECT_EQ(rows[0][kMetaColumns + 2], "label_traffic");
    for (std::size_t r = 1; r < 3; ++r) {
        EXPECT_EQ(rows[r][kMetaColumns], "vpn");
        EXPECT_EQ(rows[r][kMetaColumns + 1], "facebook");
        EXPECT_EQ(rows[r][kMetaColumns + 2], "audio");
    }
}

TEST(CliExtract, DeterministicAcrossRunsAndParallelism)
{
    TempDir dir;
    std::mt19937_64 rng(81);
    for (int i = 0; i < 6; ++i)
        write_pcap(dir / "caps" / ("f" + std::to_string(i) + ".pcap"), random_capture(rng, 300, 10));
    write_file(dir / "run.toml", R"(
[input]
paths = [caps]
[output]
dir = out
[plugins]
list = [distiller, pic, clumps, tls]
[plugin.distiller]
type = feature_set
set = distiller
[plugin.pic]
type = flowpic
window = 1
size_bins = 16
time_bins = 16
[flow]
idle_timeout = 0.5
)");
    auto snapshot = [&](const std::string& parallelism) {
        const auto cfg = cli::load_pipeline_config_file(dir / "run.toml", {"run.parallelism=" + parallelism}, true);
        std::ostringstream log;
        EXPECT_EQ(cli::cmd_extract(cfg, log), cli::kExitOk);
        std::map<std::string, std::string> files;
        for (const auto& e : fs::recursive_directory_iterator(dir / "out"))
            if (e.is_regular_file())
                files[fs::relative(e.path(), dir / "out").string()] = read_file(e.path());
        return files;
    };
    const auto a = snapshot("1");
    const auto b = snapshot("4");
    const auto c = snapshot("4");
    EXPECT_GT(a.size(), 3u);
    EXPECT_EQ(a, b);
    EXPECT_EQ(b, c);
}

TEST(CliExtract, FlowPicSparseFilesHoldEveryPacket)
{
    TempDir dir;
    std::vector<PacketSpec> specs;
    for (int i = 0; i < 25; ++i)
        specs.push_back(pkt(10.0 + i * 6.0, "10.0.0.1", 1000, "10.0.0.2", 53, 17, 0, std::string(i * 10, 'x')));
    write_pcap(dir / "a.pcap", specs);
    const auto cfg = config_in(dir.path(), "[input]\npaths = [a.pcap]\n[output]\ndir = out\n[plugins]\nlist = [flowpic]\n"
                                    "[plugin.flowpic]\nwindow = 60\nsize_bins = 32\ntime_bins = 32\n");
    std::ostringstream log;
    ASSERT_EQ(cli::cmd_extract(cfg, log), cli::kExitOk);
    const auto rows = csv_of(dir / "out" / "features.csv");
    EXPECT_EQ(rows.at(1).back(), "3");
    const auto m = json::parse(read_file(dir / "out" / "flowpic" / "flowpic" / "manifest.json"));
    ASSERT_EQ(m["windows"].size(), 3u);
    std::uint64_t total = 0;
    for (const auto& w : m["windows"]) {
        const auto cells = csv_of(dir / "out" / "flowpic" / "flowpic" / w["file"].get<std::string>());
        EXPECT_EQ(cells.at(0), (util::CsvRow{"row", "col", "count"}));
        std::uint64_t sum = 0;
        for (std::size_t i = 1; i < cells.size(); ++i) {
            EXPECT_LT(std::stoul(cells[i][0]), 32u);
            EXPECT_LT(std::stoul(cells[i][1]), 32u);
            sum += std::stoul(cells[i][2]);
        }
        EXPECT_EQ(sum, w["packets"].get<std::uint64_t>());
        total += sum;
    }
    EXPECT_EQ(total, 25u);
}

TEST(CliExtract, UnreadableFileIsRecordedAndOthersProcessed)
{
    TempDir dir;
    write_pcap(dir / "caps" / "good.pcap", two_flows());
    write_file(dir / "caps" / "bad.pcap", "garbage, not a capture");
    const auto cfg = config_in(dir.path(), "[input]\npaths = [caps]\n[output]\ndir = out\n[plugins]\nlist = [clumps]\n");
    std::ostringstream log;
    EXPECT_EQ(cli::cmd_extract(cfg, log), cli::kExitPartial);
    const auto manifest = json::parse(read_file(dir / "out" / "manifest.json"));
    ASSERT_EQ(manifest["inputs"].size(), 2u);
    EXPECT_EQ(manifest["inputs"][0]["file"], "caps/bad.pcap");
    EXPECT_EQ(manifest["inputs"][0]["status"], "error");
    EXPECT_FALSE(manifest["inputs"][0]["error"].get<std::string>().empty());
    EXPECT_EQ(manifest["inputs"][1]["status"], "ok");
    EXPECT_EQ(csv_of(dir / "out" / "features.csv").size(), 3u);
}

TEST(CliConfig, ValidationErrors)
{
    TempDir dir;
    write_pcap(dir / "a.pcap", two_flows());
    const std::string base = "[input]\npaths = [a.pcap]\n[output]\ndir = out\n";
    EXPECT_THROW(config_in(dir.path(), base), cli::FatalError); // no plugins
    EXPECT_NO_THROW(config_in(dir.path(), base, false));
    EXPECT_THROW(config_in(dir.path(), base + "[plugins]\nlist = [clumps]\n[bogus]\nk = 1\n"), cli::FatalError);
    EXPECT_THROW(config_in(dir.path(), base + "[plugins]\nlist = [clumps]\n[flow]\nidle = 1\n"), cli::FatalError);
    EXPECT_THROW(config_in(dir.path(), base + "[plugins]\nlist = [clumps]\n[flow]\nidle_timeout = -1\n"),
                 cli::FatalError);
    EXPECT_THROW(config_in(dir.path(), "[input]\npaths = [a.pcap]\n[plugins]\nlist = [clumps]\n"), cli::FatalError);
    EXPECT_THROW(config_in(dir.path(), base + "[plugins]\nlist = [clumps]\n[labels]\nmode = directory\n"),
                 cli::FatalError);

    // Plugin and input problems surface when extraction starts, before any output.
    for (const std::string& text : std::vector<std::string>
         {base + "[plugins]\nlist = [nope]\n", base + "[plugins]\nlist = [n_bytes]\n[plugin.n_bytes]\nn = x\n",
          base + "[plugins]\nlist = [asn_info]\n",
          "[input]\npaths = [missing.pcap]\n[output]\ndir = out\n[plugins]\nlist = [clumps]\n"}) {
        const auto cfg = config_in(dir.path(), text);
        std::ostringstream log;
        EXPECT_THROW(cli::cmd_extract(cfg, log), cli::FatalError) << text;
        EXPECT_FALSE(fs::exists(dir / "out" / "features.csv")) << text;
    }

    write_file(dir / "run.toml", base);
    const auto cfg = cli::load_pipeline_config_file(dir / "run.toml", {"flow.idle_timeout=7", "run.parallelism=3"}, false);
    EXPECT_EQ(cfg.flow.idle_timeout_s, 7.0);
    EXPECT_EQ(cfg.parallelism, 3u);
}

TEST(CliAnalyze, SinglePacketFlow)
{
    TempDir dir;
    write_pcap(dir / "one.pcap", {pkt(1.0, "10.0.0.1", 5000, "10.0.0.2", 53, 17, 0, "q")});
    const auto cfg = config_in(dir.path(), "[input]\npaths = [one.pcap]\n[output]\ndir = out\n", false);
    std::ostringstream log;
    ASSERT_EQ(cli::cmd_analyze(cfg, log), cli::kExitOk);
    const auto rows = csv_of(dir / "out" / "label_stats.csv");
    ASSERT_GE(rows.size(), 2u);
    const auto& h = rows[0];
    const auto col = [&](const std::string& name) { return std::find(h.begin(), h.end(), name) - h.begin(); };
    EXPECT_EQ(rows[1][col("source")], "*");
    EXPECT_EQ(rows[1][col("label")], "(unlabeled)");
    EXPECT_EQ(rows[1][col("scope")], "all");
    EXPECT_EQ(rows[1][col("flow_count")], "1");
    EXPECT_EQ(rows[1][col("defined_duration_count")], "0");
    EXPECT_EQ(rows[1][col("duration_s_mean")], "");
    EXPECT_EQ(rows[1][col("iat_ms_mean")], "");
}

TEST(CliAnalyze, UnopenedRatioOverTcpFlows)
{
    TempDir dir;
    const std::string c = "10.0.0.1", s = "10.0.0.2";
    std::vector<PacketSpec> specs;
    for (std::uint16_t port : {1001, 1002}) {
        specs.push_back(pkt(specs.size(), c, port, s, 443, 6, tf::syn));
        specs.push_back(pkt(specs.size(), s, 443, c, port, 6, tf::syn | tf::ack));
        specs.push_back(pkt(specs.size(), c, port, s, 443, 6, tf::ack));
    }
    specs.push_back(pkt(specs.size(), c, 1003, s, 443, 6, tf::ack | tf::psh, "mid-stream"));
    specs.push_back(pkt(specs.size(), c, 5000, s, 53, 17, 0, "udp"));
    write_pcap(dir / "mix.pcap", specs);
    const auto cfg = config_in(dir.path(), "[input]\npaths = [mix.pcap]\n[output]\ndir = out\n", false);
    std::ostringstream log;
    ASSERT_EQ(cli::cmd_analyze(cfg, log), cli::kExitOk);
    const auto rows = csv_of(dir / "out" / "unopened_tcp.csv");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1][1], "1");
    EXPECT_EQ(rows[1][2], "3");
    EXPECT_NEAR(std::stod(rows[1][3]), 1.0 / 3.0, 1e-15);
    const auto protos = csv_of(dir / "out" / "protocols.csv");
    EXPECT_EQ(protos.size(), 3u);
}

TEST(CliAnalyze, EmptyInputGivesHeaderOnlyReports)
{
    TempDir dir;
    fs::create_directories(dir / "empty");
    const auto cfg = config_in(dir.path(), "[input]\npaths = [empty]\n[output]\ndir = out\n", false);
    std::ostringstream log;
    ASSERT_EQ(cli::cmd_analyze(cfg, log), cli::kExitOk);
    for (const char* f : {"label_stats.csv", "protocols.csv", "unopened_tcp.csv"}) {
        const auto rows = csv_of(dir / "out" / f);
        EXPECT_EQ(rows.size(), 1u) << f;
    }
    EXPECT_TRUE(fs::exists(dir / "out" / "summary.txt"));
    EXPECT_TRUE(fs::exists(dir / "out" / "analysis_manifest.json"));
}

TEST(CliEvaluate, IdenticalFilesScorePerfectly)
{
    TempDir dir;
    write_file(dir / "t.csv", "id,label\na,x\nb,y\nc,x\n");
    std::ostringstream out;
    ASSERT_EQ(cli::cmd_evaluate({dir / "t.csv", dir / "t.csv", "multiclass", "", dir / "m"}, out), cli::kExitOk);
    const auto rows = csv_of(dir / "m" / "metrics.csv");
    EXPECT_EQ(rows.at(1), (util::CsvRow{"accuracy", "", "1"}));
    EXPECT_TRUE(fs::exists(dir / "m" / "confusion.csv"));
}

TEST(CliEvaluate, ChallengeScoreFromFiles)
{
    TempDir dir;
    const auto [truth, pred] = binary_8_2_1_9();
    std::string t = "id,label\n", p = "id,label\n";
    for (std::size_t i = 0; i < truth.size(); ++i) {
        t += "s" + std::to_string(i) + "," + truth[i] + "\n";
        p += "s" + std::to_string(truth.size() - 1 - i) + "," + pred[truth.size() - 1 - i] + "\n";
    }
    write_file(dir / "t.csv", t);
    write_file(dir / "p.csv", p);
    std::ostringstream out;
    ASSERT_EQ(cli::cmd_evaluate({dir / "t.csv", dir / "p.csv", "challenge", "mal", dir / "m"}, out), cli::kExitOk);
    double score = -1;
    for (const auto& r : csv_of(dir / "m" / "metrics.csv"))
        if (r.at(0) == "score")
            score = std::stod(r.at(2));
    EXPECT_NEAR(score, 0.72, 1e-12);
    EXPECT_NE(out.str().find("TPR"), std::string::npos);

    EXPECT_THROW(cli::cmd_evaluate({dir / "t.csv", dir / "p.csv", "challenge", "", {}}, out), cli::FatalError);
    EXPECT_THROW(cli::cmd_evaluate({dir / "t.csv", dir / "p.csv", "ranking", "", {}}, out), cli::FatalError);
}

TEST(CliBinary, ExitCodesAndMessages)
{
    TempDir dir;
    write_pcap(dir / "a.pcap", two_flows());
    write_file(dir / "run.toml", "[input]\npaths = [a.pcap]\n[output]\ndir = out\n[plugins]\nlist = [n_bytes]\n");
    std::string text;
    EXPECT_EQ(run_cli("extract --config " + (dir / "run.toml").string(), &text), 0) << text;
    EXPECT_TRUE(fs::exists(dir / "out" / "features.csv"));

    // Dotted flag override, same name as the config key.
    EXPECT_EQ(run_cli("extract --config " + (dir / "run.toml").string() + " --plugin.n_bytes.n=8", &text), 0) << text;
    EXPECT_EQ(csv_of(dir / "out" / "features.csv").at(0).size(), kMetaColumns + 8);
    EXPECT_EQ(run_cli("extract --config " + (dir / "run.toml").string() + " --override plugin.n_bytes.n=4", &text), 0);
    EXPECT_EQ(csv_of(dir / "out" / "features.csv").at(0).size(), kMetaColumns + 4);

    EXPECT_EQ(run_cli("analyze --config " + (dir / "run.toml").string(), &text), 0) << text;
    EXPECT_EQ(run_cli("extract --config " + (dir / "missing.toml").string(), &text), 1);
    EXPECT_EQ(run_cli("extract --config " + (dir / "run.toml").string() + " --plugins.list=[bogus]", &text), 1);
    EXPECT_NE(text.find("bogus"), std::string::npos) << text;

    write_file(dir / "caps" / "bad.pcap", "nope");
    write_pcap(dir / "caps" / "good.pcap", two_flows());
    write_file(dir / "partial.toml", "[input]\npaths = [caps]\n[output]\ndir = out2\n[plugins]\nlist = [clumps]\n");
    EXPECT_EQ(run_cli("extract --config " + (dir / "partial.toml").string(), &text), 2) << text;

    write_file(dir / "t.csv", "id,label\n1,a\n2,b\n");
    write_file(dir / "p.csv", "id,label\n1,a\n");
    EXPECT_EQ(run_cli("evaluate --truth " + (dir / "t.csv").string() + " --pred " + (dir / "p.csv").string(), &text), 1);
    EXPECT_NE(text.find("'2'"), std::string::npos) << text;
    EXPECT_EQ(run_cli("evaluate --truth " + (dir / "t.csv").string() + " --pred " + (dir / "t.csv").string(), &text), 0);
    EXPECT_NE(text.find("accuracy"), std::string::npos) << text;
}

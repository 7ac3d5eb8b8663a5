#include "netfeat/flow/capture_flows.hpp"

#include "netfeat/capture/decoder.hpp"
#include "netfeat/capture/reader.hpp"

namespace netfeat::flow {

CaptureStats process_capture(const std::filesystem::path& path, const FlowTableConfig& config,
                             const std::string& source_name, const FlowSink& sink)
{
    capture::CaptureReader reader(path);
    FlowTable table(config, source_name);
    CaptureStats stats;
    const auto emit = [&](std::vector<BiFlow>&& flows) {
        for (BiFlow& f : flows) {
            ++stats.flows;
            sink(std::move(f));
        }
    };
    while (auto rec = reader.next()) {
        ++stats.records;
        auto decoded = capture::decode_packet(rec->data, rec->link_type, rec->timestamp);
        if (auto* skip = std::get_if<capture::Skip>(&decoded)) {
            ++stats.skipped[std::string(capture::to_string(skip->reason))];
            continue;
        }
        ++stats.decoded;
        emit(table.ingest(std::get<capture::DecodedPacket>(decoded)));
    }
    emit(table.flush());
    stats.warnings = reader.warnings();
    return stats;
}

} // namespace netfeat::flow

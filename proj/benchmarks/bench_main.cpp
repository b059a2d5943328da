// Microbenchmarks for the hot paths: store opening, row extraction, route
// reconstruction, hashing, timeline assembly, and report rendering.

#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "mhf/mfp.hpp"
#include "mhf/report.hpp"
#include "mhf/runkeeper.hpp"
#include "mhf/sha256.hpp"
#include "mhf/store.hpp"

using namespace mhf;

namespace {

const std::filesystem::path& bench_tree() {
    static const std::filesystem::path root = [] {
        const auto r = test::fixture_dir() / "bench-tree";
        test::build_tree(r);
        return r;
    }();
    return root;
}

void bench_open_store(benchmark::State& state) {
    const auto& path = test::mfp_path();
    for (auto _ : state) {
        const StoreHandle handle = open_store(path);
        benchmark::DoNotOptimize(handle.table_names().size());
    }
}

void bench_read_rows(benchmark::State& state) {
    const StoreHandle handle = open_store(test::runkeeper_path());
    for (auto _ : state) {
        const Rows rows = handle.read_rows("points");
        benchmark::DoNotOptimize(rows.size());
    }
}

void bench_pivot_properties(benchmark::State& state) {
    const StoreHandle handle = open_store(test::mfp_path());
    const Rows rows = handle.read_rows("user_properties");
    const ZoneSpec utc{};
    for (auto _ : state) {
        WarningLog log;
        auto profiles = mfp::pivot_user_properties(rows, utc, log);
        benchmark::DoNotOptimize(profiles.size());
    }
}

void bench_reconstruct_routes(benchmark::State& state) {
    const StoreHandle handle = open_store(test::runkeeper_path());
    WarningLog log;
    const auto trips = runkeeper::parse_trips(handle.read_rows("trips"), log);
    const auto points = runkeeper::parse_points(handle.read_rows("points"), log);
    const Rows settings = handle.read_rows("trip_settings");
    const Rows deleted = handle.read_rows("deleted_trips");
    for (auto _ : state) {
        WarningLog inner;
        auto recon = runkeeper::reconstruct_routes(trips, points, settings,
                                                   deleted, inner);
        benchmark::DoNotOptimize(recon.routes.size());
    }
}

void bench_sha256_1mb(benchmark::State& state) {
    const std::string block(1 << 20, 'x');
    for (auto _ : state) {
        benchmark::DoNotOptimize(sha256_hex(block));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(block.size()));
}

void bench_epoch_decode(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            decode_epoch_ms(std::int64_t{1422297991793}).to_iso8601());
    }
}

void bench_build_timeline(benchmark::State& state) {
    std::vector<EvidenceRecord> records;
    for (int i = 0; i < 1000; ++i) {
        EventData e;
        e.kind = "marker";
        records.push_back(EvidenceRecord::make(
            "RunKeeper", "points", i, e,
            Timestamp::from_epoch(
                EpochMillis(1422297991793 + (i * 7919) % 100000))));
    }
    for (auto _ : state) {
        auto timeline = report::build_timeline(records);
        benchmark::DoNotOptimize(timeline.events.size());
    }
}

void bench_full_analyze(benchmark::State& state) {
    const auto& root = bench_tree();
    report::AnalysisOptions options;
    for (auto _ : state) {
        auto analysis = report::analyze({root}, options);
        benchmark::DoNotOptimize(analysis.records.size());
    }
}

void bench_render_json(benchmark::State& state) {
    report::AnalysisOptions options;
    const auto analysis = report::analyze({bench_tree()}, options);
    for (auto _ : state) {
        benchmark::DoNotOptimize(report::render_json(analysis, {}).size());
    }
}

} // namespace

BENCHMARK(bench_open_store)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_read_rows)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_pivot_properties)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_reconstruct_routes)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_sha256_1mb)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_epoch_decode);
BENCHMARK(bench_build_timeline)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_full_analyze)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_render_json)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

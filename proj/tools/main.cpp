// mhf: mobile-health app forensic triage.
//
// analyze <path>... walks extracted evidence (single databases or whole
// logical-image trees), parses what it recognizes, reconstructs location
// chronologies, grades the recovery against the shipped registry, and emits
// deterministic reports.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "mhf/report.hpp"

namespace {

constexpr int kExitUsage = 3;
constexpr int kExitFatal = 2;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mobile-health app forensic triage", "mhf"};
    app.require_subcommand(1);

    std::vector<std::string> input_args;
    std::string app_arg = "auto";
    std::string format_arg = "text";
    std::string out_dir = ".";
    std::string tz_arg;
    std::string redact_arg = "off";
    std::string registry_arg;
    bool matrix = false;
    bool gpx = false;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "analyze extracted databases or a logical-image tree");
    analyze->add_option("path", input_args, "evidence files or directories")
        ->required()
        ->expected(-1);
    analyze->add_option("--app", app_arg, "force a parser instead of auto-detecting")
        ->check(CLI::IsMember({"auto", "mfp", "runkeeper", "periodcal"}));
    analyze->add_option("--format", format_arg, "report format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    analyze->add_option("--out", out_dir, "output directory (default: .)");
    analyze->add_option(
        "--tz", tz_arg,
        "assumed zone for naive datetimes, e.g. UTC or +10:30 "
        "(default: $MHF_TZ or UTC)");
    analyze->add_option("--redact", redact_arg, "mask recovered secrets")
        ->check(CLI::IsMember({"off", "credentials", "all"}));
    analyze->add_option("--registry", registry_arg,
                        "override the embedded grading registry");
    analyze->add_flag("--matrix", matrix,
                      "include the full grading matrix in the report");
    analyze->add_flag("--gpx", gpx, "also export reconstructed routes as GPX 1.1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    mhf::report::AnalysisOptions options;
    if (app_arg == "mfp") options.app = mhf::report::AppOverride::Mfp;
    else if (app_arg == "runkeeper") options.app = mhf::report::AppOverride::RunKeeper;
    else if (app_arg == "periodcal") options.app = mhf::report::AppOverride::PeriodCal;

    if (redact_arg == "credentials")
        options.redaction.mode = mhf::report::RedactionMode::MaskCredentials;
    else if (redact_arg == "all")
        options.redaction.mode = mhf::report::RedactionMode::MaskAll;

    if (tz_arg.empty()) {
        if (const char* env = std::getenv("MHF_TZ")) tz_arg = env;
    }
    try {
        options.tz = mhf::ZoneSpec::parse(tz_arg);
    } catch (const mhf::DecodeError& e) {
        std::cerr << "mhf: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!registry_arg.empty()) options.registry_file = registry_arg;

    mhf::report::EmitOptions emit;
    emit.include_matrix = matrix;
    if (format_arg == "json") emit.format = mhf::report::Format::Json;
    else if (format_arg == "csv") emit.format = mhf::report::Format::Csv;
    else emit.format = mhf::report::Format::Text;

    std::vector<std::filesystem::path> inputs(input_args.begin(),
                                              input_args.end());
    try {
        const mhf::report::Analysis analysis =
            mhf::report::analyze(inputs, options);

        const auto written = mhf::report::emit_report(analysis, emit, out_dir);
        for (const auto& path : written)
            std::cerr << "wrote " << path.string() << "\n";
        if (gpx) {
            for (const auto& path : mhf::report::emit_gpx(analysis, out_dir))
                std::cerr << "wrote " << path.string() << "\n";
        }
        if (emit.format == mhf::report::Format::Text)
            std::cout << mhf::report::render_text(analysis, emit);

        if (analysis.no_evidence) {
            std::cerr << "mhf: no parsable evidence found\n";
            return kExitFatal;
        }
        return analysis.exit_code();
    } catch (const mhf::taxonomy::RegistryError& e) {
        std::cerr << "mhf: registry error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const mhf::IoError& e) {
        std::cerr << "mhf: " << e.what() << "\n";
        return kExitFatal;
    } catch (const std::exception& e) {
        std::cerr << "mhf: " << e.what() << "\n";
        return kExitFatal;
    }
}

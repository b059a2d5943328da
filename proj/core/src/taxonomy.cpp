#include "mhf/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mhf::taxonomy {

namespace data {
// Generated from core/data/*.txt at build time.
const std::string& registry_text();
const std::string& matrix_text();
} // namespace data

namespace {

const char* kAppCatTokens[kAppCategoryCount] = {"PCM", "LAY", "CER", "PSR"};
const char* kArtefactTokens[kArtefactCategoryCount] = {"DB",  "CRED", "PERS",
                                                       "ACT", "LOC",  "TS",
                                                       "IMG"};

std::optional<AppCategory> app_category_from_token(std::string_view t) {
    for (int i = 0; i < kAppCategoryCount; ++i)
        if (t == kAppCatTokens[i]) return static_cast<AppCategory>(i);
    return std::nullopt;
}

std::optional<ArtefactCategory> artefact_from_token(std::string_view t) {
    for (int i = 0; i < kArtefactCategoryCount; ++i)
        if (t == kArtefactTokens[i]) return static_cast<ArtefactCategory>(i);
    return std::nullopt;
}

std::optional<CoverageGrade> grade_from_token(std::string_view t) {
    if (t == "F") return CoverageGrade::F;
    if (t == "P") return CoverageGrade::P;
    if (t == "N") return CoverageGrade::N;
    return std::nullopt;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

long app_number(const std::string& app_id) {
    if (app_id.rfind("App", 0) != 0) return -1;
    long n = 0;
    for (std::size_t i = 3; i < app_id.size(); ++i) {
        if (app_id[i] < '0' || app_id[i] > '9') return -1;
        n = n * 10 + (app_id[i] - '0');
    }
    return app_id.size() > 3 ? n : -1;
}

void sort_apps(std::vector<std::string>& apps) {
    std::sort(apps.begin(), apps.end(),
              [](const std::string& a, const std::string& b) {
                  const long na = app_number(a), nb = app_number(b);
                  if (na != nb) return na < nb;
                  return a < b;
              });
}

std::string cell_label(const CellKey& key) {
    std::string out = "[";
    out += to_string(key.app_cat);
    out += key.app_full ? "/full" : "/partial";
    out += " x ";
    out += to_string(key.artefact_cat);
    out += key.artefact_full ? "/full" : "/partial";
    out += "]";
    return out;
}

} // namespace

Registry load_registry(std::string_view text) {
    Registry registry;
    std::set<std::string> seen_ids;
    std::size_t line_no = 0;
    for (const std::string& raw_line : split(text, '\n')) {
        ++line_no;
        const std::string line = trim(raw_line);
        if (line.empty() || line[0] == '#') continue;

        const auto fields = split(line, '|');
        if (fields.size() != 5)
            throw RegistryError("registry line " + std::to_string(line_no) +
                                ": expected 5 |-separated fields, got " +
                                std::to_string(fields.size()));
        AppRegistryEntry entry;
        entry.app_id = trim(fields[0]);
        entry.name = trim(fields[1]);
        const std::string version = trim(fields[2]);
        if (!version.empty() && version != "-") entry.version = version;

        if (entry.app_id.empty() || entry.name.empty())
            throw RegistryError("registry line " + std::to_string(line_no) +
                                ": empty app id or name");
        if (!seen_ids.insert(entry.app_id).second)
            throw RegistryError(entry.app_id + ": listed twice in the registry");

        const auto cat_tokens = split_ws(fields[3]);
        if (cat_tokens.size() != kAppCategoryCount)
            throw RegistryError(entry.app_id + ": expected " +
                                std::to_string(kAppCategoryCount) +
                                " app-category grades, got " +
                                std::to_string(cat_tokens.size()));
        for (int i = 0; i < kAppCategoryCount; ++i) {
            const auto g = grade_from_token(cat_tokens[i]);
            if (!g)
                throw RegistryError(
                    entry.app_id + ": bad grade '" + cat_tokens[i] + "' for " +
                    std::string(to_string(static_cast<AppCategory>(i))));
            entry.category_grades[i] = *g;
        }

        const auto art_tokens = split_ws(fields[4]);
        if (art_tokens.size() != kArtefactCategoryCount)
            throw RegistryError(entry.app_id + ": expected " +
                                std::to_string(kArtefactCategoryCount) +
                                " artefact grades, got " +
                                std::to_string(art_tokens.size()));
        for (int i = 0; i < kArtefactCategoryCount; ++i) {
            const auto g = grade_from_token(art_tokens[i]);
            if (!g)
                throw RegistryError(
                    entry.app_id + ": bad grade '" + art_tokens[i] + "' for " +
                    std::string(to_string(static_cast<ArtefactCategory>(i))));
            entry.artefact_grades[i] = *g;
        }
        registry.push_back(std::move(entry));
    }
    return registry;
}

Registry load_registry_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RegistryError("cannot read registry file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_registry(buf.str());
}

const std::string& embedded_registry_text() { return data::registry_text(); }

const Registry& embedded_registry() {
    static const Registry registry = load_registry(data::registry_text());
    return registry;
}

const AppRegistryEntry* find_app(const Registry& reg,
                                 const std::string& app_id) {
    for (const AppRegistryEntry& e : reg)
        if (e.app_id == app_id) return &e;
    return nullptr;
}

std::optional<std::string> registry_id_for(AppId app) {
    switch (app) {
    case AppId::MyFitnessPal: return "App1";
    case AppId::RunKeeper: return "App2";
    case AppId::PeriodCalendar:
    case AppId::PeriodCalendarPill: return "App3";
    case AppId::Unknown: return std::nullopt;
    }
    return std::nullopt;
}

const std::vector<std::string>& TaxonomyMatrix::cell(AppCategory ac,
                                                     bool app_full,
                                                     ArtefactCategory tc,
                                                     bool artefact_full) const {
    static const std::vector<std::string> empty;
    const auto it = cells.find(CellKey{ac, app_full, tc, artefact_full});
    return it == cells.end() ? empty : it->second;
}

TaxonomyMatrix render_matrix(const Registry& registry) {
    TaxonomyMatrix matrix;
    for (const AppRegistryEntry& entry : registry) {
        for (int c = 0; c < kAppCategoryCount; ++c) {
            const CoverageGrade cg = entry.category_grades[c];
            if (cg == CoverageGrade::N) continue;
            for (int a = 0; a < kArtefactCategoryCount; ++a) {
                const CoverageGrade ag = entry.artefact_grades[a];
                if (ag == CoverageGrade::N) continue;
                const CellKey key{static_cast<AppCategory>(c),
                                  cg == CoverageGrade::F,
                                  static_cast<ArtefactCategory>(a),
                                  ag == CoverageGrade::F};
                matrix.cells[key].push_back(entry.app_id);
            }
        }
    }
    for (auto& [key, apps] : matrix.cells) sort_apps(apps);
    return matrix;
}

namespace {

// Canonical display order: each app category, Full row then Partial row.
void for_each_cell(const auto& fn) {
    for (int c = 0; c < kAppCategoryCount; ++c)
        for (bool app_full : {true, false})
            for (int a = 0; a < kArtefactCategoryCount; ++a)
                for (bool art_full : {true, false})
                    fn(CellKey{static_cast<AppCategory>(c), app_full,
                               static_cast<ArtefactCategory>(a), art_full});
}

} // namespace

std::string matrix_to_csv(const TaxonomyMatrix& m) {
    std::string out =
        "app_category,app_grade,artefact_category,artefact_grade,apps\n";
    for_each_cell([&](const CellKey& key) {
        out += to_string(key.app_cat);
        out += key.app_full ? ",full," : ",partial,";
        out += to_string(key.artefact_cat);
        out += key.artefact_full ? ",full," : ",partial,";
        std::string apps;
        for (const std::string& app :
             m.cell(key.app_cat, key.app_full, key.artefact_cat,
                    key.artefact_full)) {
            if (!apps.empty()) apps += ' ';
            apps += app;
        }
        out += apps;
        out += '\n';
    });
    return out;
}

std::string matrix_to_text(const TaxonomyMatrix& m) {
    std::string out;
    for (int c = 0; c < kAppCategoryCount; ++c) {
        for (bool app_full : {true, false}) {
            out += std::string(to_string(static_cast<AppCategory>(c)));
            out += app_full ? " / full\n" : " / partial\n";
            bool any = false;
            for (int a = 0; a < kArtefactCategoryCount; ++a) {
                for (bool art_full : {true, false}) {
                    const auto& apps =
                        m.cell(static_cast<AppCategory>(c), app_full,
                               static_cast<ArtefactCategory>(a), art_full);
                    if (apps.empty()) continue;
                    any = true;
                    out += "  ";
                    out += to_string(static_cast<ArtefactCategory>(a));
                    out += art_full ? "/full:" : "/partial:";
                    for (const std::string& app : apps) {
                        out += ' ';
                        out += app;
                    }
                    out += '\n';
                }
            }
            if (!any) out += "  (no apps)\n";
        }
    }
    return out;
}

const std::string& published_matrix_text() { return data::matrix_text(); }

std::string MatrixErratum::describe() const {
    std::string out = "cell " + cell_label(cell) + ": " + app_id;
    switch (kind) {
    case Kind::DuplicateListing:
        out += " listed twice in the published table";
        break;
    case Kind::MissingFromPublished:
        out += " follows from the registry grades but is absent from the "
               "published table";
        break;
    case Kind::ExtraInPublished:
        out += " appears in the published table but not in the registry grades";
        break;
    }
    return out;
}

TaxonomyMatrix parse_published_matrix(std::string_view text,
                                      std::vector<MatrixErratum>& duplicates) {
    TaxonomyMatrix matrix;
    std::size_t line_no = 0;
    for (const std::string& raw_line : split(text, '\n')) {
        ++line_no;
        const std::string line = trim(raw_line);
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, '|');
        if (fields.size() != 5)
            throw RegistryError("published matrix line " +
                                std::to_string(line_no) + ": expected 5 fields");
        const auto ac = app_category_from_token(trim(fields[0]));
        const auto tc = artefact_from_token(trim(fields[2]));
        const std::string app_grade = trim(fields[1]);
        const std::string art_grade = trim(fields[3]);
        if (!ac || !tc || (app_grade != "Full" && app_grade != "Partial") ||
            (art_grade != "Full" && art_grade != "Partial"))
            throw RegistryError("published matrix line " +
                                std::to_string(line_no) + ": bad cell key");
        const CellKey key{*ac, app_grade == "Full", *tc, art_grade == "Full"};
        auto& cell = matrix.cells[key];
        for (const std::string& app : split_ws(fields[4])) {
            if (std::find(cell.begin(), cell.end(), app) != cell.end()) {
                duplicates.push_back(
                    {key, app, MatrixErratum::Kind::DuplicateListing});
                continue;
            }
            cell.push_back(app);
        }
    }
    for (auto& [key, apps] : matrix.cells) sort_apps(apps);
    return matrix;
}

std::vector<MatrixErratum> matrix_errata(const Registry& registry) {
    std::vector<MatrixErratum> errata;
    const TaxonomyMatrix generated = render_matrix(registry);
    const TaxonomyMatrix published =
        parse_published_matrix(data::matrix_text(), errata);

    std::set<CellKey> keys;
    for (const auto& [key, apps] : generated.cells) keys.insert(key);
    for (const auto& [key, apps] : published.cells) keys.insert(key);

    for (const CellKey& key : keys) {
        const auto& gen = generated.cell(key.app_cat, key.app_full,
                                         key.artefact_cat, key.artefact_full);
        const auto& pub = published.cell(key.app_cat, key.app_full,
                                         key.artefact_cat, key.artefact_full);
        for (const std::string& app : gen)
            if (std::find(pub.begin(), pub.end(), app) == pub.end())
                errata.push_back(
                    {key, app, MatrixErratum::Kind::MissingFromPublished});
        for (const std::string& app : pub)
            if (std::find(gen.begin(), gen.end(), app) == gen.end())
                errata.push_back(
                    {key, app, MatrixErratum::Kind::ExtraInPublished});
    }
    std::sort(errata.begin(), errata.end());
    return errata;
}

std::set<ArtefactCategory> classify_artefact(const EvidenceRecord& record) {
    std::set<ArtefactCategory> out;
    switch (record.kind()) {
    case RecordKind::Identity:
        out.insert(ArtefactCategory::PersonalDetails);
        break;
    case RecordKind::Credential:
        // Credentials are classified by what they are, not when they were
        // last synced; they never feed the timestamp category.
        out.insert(ArtefactCategory::UserCredentials);
        return out;
    case RecordKind::GeoFix:
        out.insert(ArtefactCategory::UserLocation);
        break;
    case RecordKind::Note:
    case RecordKind::Measurement:
        out.insert(ArtefactCategory::UserActivities);
        break;
    case RecordKind::MediaRef:
        out.insert(ArtefactCategory::Images);
        break;
    case RecordKind::Event: {
        const auto& event = *record.as<EventData>();
        if (event.kind == "database") {
            out.insert(ArtefactCategory::Databases);
        } else if (event.kind != "friend") {
            out.insert(ArtefactCategory::UserActivities);
        }
        break;
    }
    }
    if (record.observed_at) out.insert(ArtefactCategory::ActivityTimestamps);
    return out;
}

namespace {

CoverageGrade max_grade(CoverageGrade a, CoverageGrade b) {
    const auto rank = [](CoverageGrade g) {
        return g == CoverageGrade::F ? 2 : g == CoverageGrade::P ? 1 : 0;
    };
    return rank(a) >= rank(b) ? a : b;
}

// Per-record grade contribution to one category; aggregation is max, which
// keeps grading monotone under record addition.
CoverageGrade contribution(const EvidenceRecord& record, ArtefactCategory cat) {
    switch (cat) {
    case ArtefactCategory::Databases: {
        const auto* event = record.as<EventData>();
        if (!event) return CoverageGrade::N;
        const auto it = event->details.find("degraded");
        const bool degraded = it != event->details.end() && it->second == "true";
        return degraded ? CoverageGrade::P : CoverageGrade::F;
    }
    case ArtefactCategory::UserCredentials: {
        const auto* cred = record.as<CredentialData>();
        if (!cred) return CoverageGrade::N;
        // Full only when the account password itself is recovered in
        // plaintext; pins, digests, diary passwords, and secret answers are
        // partial recovery of the credential set.
        return cred->kind.type == CredentialType::PlaintextPassword
                   ? CoverageGrade::F
                   : CoverageGrade::P;
    }
    case ArtefactCategory::PersonalDetails: {
        const auto* identity = record.as<IdentityData>();
        if (!identity) return CoverageGrade::N;
        int filled = 0;
        bool has_email = false;
        for (const auto& [name, attr] : identity->attributes) {
            if (attr.value.empty()) continue;
            ++filled;
            if (name.find("email") != std::string::npos) has_email = true;
        }
        if (filled == 0) return CoverageGrade::N;
        return (has_email || filled >= 2) ? CoverageGrade::F : CoverageGrade::P;
    }
    case ArtefactCategory::UserActivities: {
        if (const auto* note = record.as<NoteData>())
            return note->body.empty() ? CoverageGrade::P : CoverageGrade::F;
        if (record.as<MeasurementData>()) return CoverageGrade::F;
        if (const auto* event = record.as<EventData>())
            return event->details.empty() ? CoverageGrade::P : CoverageGrade::F;
        return CoverageGrade::N;
    }
    case ArtefactCategory::UserLocation: {
        const auto* fix = record.as<GeoFixData>();
        if (!fix) return CoverageGrade::N;
        return fix->valid ? CoverageGrade::F : CoverageGrade::P;
    }
    case ArtefactCategory::ActivityTimestamps: {
        if (!record.observed_at) return CoverageGrade::N;
        return record.observed_at->precision() == TimePrecision::DateOnly
                   ? CoverageGrade::P
                   : CoverageGrade::F;
    }
    case ArtefactCategory::Images: {
        const auto* media = record.as<MediaRefData>();
        if (!media) return CoverageGrade::N;
        return media->target.empty() ? CoverageGrade::P : CoverageGrade::F;
    }
    }
    return CoverageGrade::N;
}

} // namespace

GradeReport grade_extraction(std::span<const EvidenceRecord> records,
                             const std::string& app_id,
                             const Registry& registry) {
    const AppRegistryEntry* expected = find_app(registry, app_id);
    if (!expected)
        throw RegistryError("unknown app id: " + app_id);

    GradeReport report;
    report.app_id = app_id;
    report.grades.fill(CoverageGrade::N);

    for (const EvidenceRecord& record : records) {
        for (ArtefactCategory cat : classify_artefact(record)) {
            auto& slot = report.grades[static_cast<std::size_t>(cat)];
            slot = max_grade(slot, contribution(record, cat));
        }
    }
    for (int i = 0; i < kArtefactCategoryCount; ++i) {
        if (report.grades[i] != expected->artefact_grades[i])
            report.deltas.push_back({static_cast<ArtefactCategory>(i),
                                     report.grades[i],
                                     expected->artefact_grades[i]});
    }
    return report;
}

} // namespace mhf::taxonomy

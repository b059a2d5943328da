// The two-dimensional grading taxonomy: the 40-app registry, the
// app-category x artefact-category matrix, artefact classification of
// evidence records, and the coverage-grading engine.

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mhf/evidence.hpp"
#include "mhf/store.hpp"

namespace mhf::taxonomy {

struct RegistryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AppRegistryEntry {
    std::string app_id;  // "App1".."App40"
    std::string name;
    std::optional<std::string> version;
    std::array<CoverageGrade, kAppCategoryCount> category_grades{};
    std::array<CoverageGrade, kArtefactCategoryCount> artefact_grades{};

    CoverageGrade category_grade(AppCategory c) const {
        return category_grades[static_cast<std::size_t>(c)];
    }
    CoverageGrade artefact_grade(ArtefactCategory c) const {
        return artefact_grades[static_cast<std::size_t>(c)];
    }
};

using Registry = std::vector<AppRegistryEntry>;

// Line-oriented registry format:
//   app_id|name|version|PCM LAY CER PSR|DB CRED PERS ACT LOC TS IMG
// '#' starts a comment, '-' marks an absent version. Throws RegistryError
// naming the offending app and column.
Registry load_registry(std::string_view text);
Registry load_registry_file(const std::filesystem::path& path);

// The registry shipped with the tool (40 entries).
const std::string& embedded_registry_text();
const Registry& embedded_registry();

const AppRegistryEntry* find_app(const Registry& reg, const std::string& app_id);

// Registry app id for a fingerprinted database, when covered.
std::optional<std::string> registry_id_for(AppId app);

// --- matrix ----------------------------------------------------------------

struct CellKey {
    AppCategory app_cat;
    bool app_full = true;  // Full vs Partial membership row
    ArtefactCategory artefact_cat;
    bool artefact_full = true;

    auto operator<=>(const CellKey&) const = default;
};

struct TaxonomyMatrix {
    // Only non-empty cells are stored; app ids sorted numerically.
    std::map<CellKey, std::vector<std::string>> cells;

    const std::vector<std::string>& cell(AppCategory ac, bool app_full,
                                         ArtefactCategory tc,
                                         bool artefact_full) const;
};

// An app lands in cell ((c,g1),(a,g2)) iff its grades are exactly g1 and g2
// with neither N.
TaxonomyMatrix render_matrix(const Registry& registry);

std::string matrix_to_csv(const TaxonomyMatrix& m);
std::string matrix_to_text(const TaxonomyMatrix& m);

// --- published-matrix comparison -------------------------------------------

// The matrix as published (transcribed verbatim, duplicates included), used
// to cross-check the regenerated matrix and surface transcription errata.
const std::string& published_matrix_text();

struct MatrixErratum {
    enum class Kind { DuplicateListing, MissingFromPublished, ExtraInPublished };
    CellKey cell;
    std::string app_id;
    Kind kind;

    auto operator<=>(const MatrixErratum&) const = default;
    std::string describe() const;
};

// Parses the published transcription; duplicate listings within a cell are
// recorded and de-duplicated.
TaxonomyMatrix parse_published_matrix(std::string_view text,
                                      std::vector<MatrixErratum>& duplicates);

// Regenerates the matrix from the registry and diffs it against the
// published transcription. Differences are reported, never silently
// resolved.
std::vector<MatrixErratum> matrix_errata(const Registry& registry);

// --- classification and grading ---------------------------------------------

// Deterministic mapping of a record onto artefact categories; a record can
// contribute to several (e.g. a located, timestamped fix).
std::set<ArtefactCategory> classify_artefact(const EvidenceRecord& record);

struct GradeDelta {
    ArtefactCategory category;
    CoverageGrade computed;
    CoverageGrade expected;
};

struct GradeReport {
    std::string app_id;
    std::array<CoverageGrade, kArtefactCategoryCount> grades{};
    std::vector<GradeDelta> deltas;  // mismatches vs the registry row

    CoverageGrade grade(ArtefactCategory c) const {
        return grades[static_cast<std::size_t>(c)];
    }
};

// Grades an extraction: F for categories with complete detail, P for
// partial recovery (e.g. date-only timestamps), N when nothing was
// recovered; the result is compared against the registry's expected row.
// Throws RegistryError for an unknown app id. Monotone: adding records
// never lowers a grade.
GradeReport grade_extraction(std::span<const EvidenceRecord> records,
                             const std::string& app_id,
                             const Registry& registry);

} // namespace mhf::taxonomy

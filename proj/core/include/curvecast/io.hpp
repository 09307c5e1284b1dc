#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "curvecast/types.hpp"

namespace curvecast::io {

/// Load a CSV dataset. `schema` maps every header column (except the label)
/// to its kind; rows with any missing value are dropped and counted.
/// Categorical columns are ordinal-encoded by first appearance. The task is
/// inferred from the label's schema kind: categorical -> classification
/// (binclass when 2 classes), numerical -> regression.
DatasetSummary load_dataset(const std::filesystem::path& path,
                            const std::map<std::string, ColumnKind>& schema,
                            const std::string& label);

struct CurveLoadReport {
  std::vector<ValidationCurve> curves;
  /// IDs of curves rejected because T < k+1 (no non-empty query set).
  std::vector<std::string> rejected_short;
};

/// Load a curve corpus from JSON (top-level array of curve objects).
/// Invariant violations throw; curves shorter than k+1 are rejected softly.
CurveLoadReport load_curves(const std::filesystem::path& path, std::size_t k = 5);

void save_curves(const std::filesystem::path& path,
                 const std::vector<ValidationCurve>& curves);

/// Load a results CSV (dataset_id, higher_is_better, one column per method),
/// optionally joined with a long-format seed CSV (dataset_id, method, seed,
/// value). Seed means must match the values cells within 1e-9.
ResultsTable load_results(const std::filesystem::path& path,
                          const std::filesystem::path& seed_path = {});

void save_results(const std::filesystem::path& path, const ResultsTable& table);

/// One entry of a meta-feature corpus: the 19 predictor slots in frozen
/// order, keyed by dataset ID.
struct MetaRecord {
  std::string dataset_id;
  std::string layout_version;
  std::array<double, 19> slots{};
};

void save_meta(const std::filesystem::path& path,
               const std::vector<MetaRecord>& records);

/// Accepts either a JSON array file or a directory of per-dataset JSON
/// objects (every *.json inside, in filename order).
std::vector<MetaRecord> load_meta(const std::filesystem::path& path);

/// Format a double as decimal text with 17 significant digits (round-trip
/// exact; used for all CSV fixtures).
std::string format_real(double v);

std::string read_file(const std::filesystem::path& path);

/// Write a file atomically: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

}  // namespace curvecast::io

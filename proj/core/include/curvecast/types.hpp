#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvecast/error.hpp"

namespace curvecast {

enum class Task { binclass, multiclass, regression };
enum class Metric { accuracy, normalized_rmse };
enum class ColumnKind { numerical, categorical };

std::string to_string(Task t);
std::string to_string(Metric m);
Task task_from_string(const std::string& s);
Metric metric_from_string(const std::string& s);

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::numerical;
  /// Numerical values, or non-negative integer codes for categorical columns
  /// (ordinal-encoded by first appearance in file order).
  std::vector<double> values;
};

/// A loaded tabular dataset: feature columns plus the label column.
struct DatasetSummary {
  std::string id;
  Task task = Task::binclass;
  std::size_t n_instances = 0;
  std::size_t n_features = 0;
  std::optional<std::size_t> n_classes;  // absent for regression
  std::vector<Column> columns;           // excludes the label column
  /// Label values: class codes for classification, raw reals for regression.
  std::vector<double> labels;
  std::size_t dropped_rows = 0;

  void validate() const;
};

/// Per-epoch validation-metric series recorded during one training run.
struct ValidationCurve {
  std::string dataset_id;
  Task task = Task::binclass;
  Metric metric = Metric::accuracy;
  std::vector<double> values;

  std::size_t epochs() const { return values.size(); }
};

/// datasets x methods table of final performance values.
struct ResultsTable {
  std::vector<std::string> methods;      // length L
  std::vector<std::string> datasets;     // length D
  std::vector<bool> higher_is_better;    // per dataset
  std::vector<std::vector<double>> values;  // D rows of L values
  /// Optional per-seed repeats, D x L x S. Mean over seeds must match the
  /// corresponding values cell within 1e-9.
  std::vector<std::vector<std::vector<double>>> seeds;

  std::size_t n_methods() const { return methods.size(); }
  std::size_t n_datasets() const { return datasets.size(); }
  bool has_seeds() const { return !seeds.empty(); }
  std::size_t method_index(const std::string& name) const;
};

}  // namespace curvecast

#include "curvecast/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "curvecast/metafeatures.hpp"

namespace curvecast {

std::string to_string(Task t) {
  switch (t) {
    case Task::binclass: return "binclass";
    case Task::multiclass: return "multiclass";
    case Task::regression: return "regression";
  }
  return "?";
}

std::string to_string(Metric m) {
  return m == Metric::accuracy ? "accuracy" : "normalized_rmse";
}

Task task_from_string(const std::string& s) {
  if (s == "binclass") return Task::binclass;
  if (s == "multiclass") return Task::multiclass;
  if (s == "regression") return Task::regression;
  throw Error("unknown task: " + s);
}

Metric metric_from_string(const std::string& s) {
  if (s == "accuracy") return Metric::accuracy;
  if (s == "normalized_rmse") return Metric::normalized_rmse;
  throw Error("unknown metric: " + s);
}

void DatasetSummary::validate() const {
  if (n_instances < 1) throw Error("dataset " + id + ": no instances");
  if (n_features != columns.size())
    throw Error("dataset " + id + ": n_features != |columns|");
  for (const auto& c : columns)
    if (c.values.size() != n_instances)
      throw Error("dataset " + id + ": column " + c.name + " length mismatch");
  if (labels.size() != n_instances)
    throw Error("dataset " + id + ": label length mismatch");
  if (task == Task::regression) {
    if (n_classes) throw Error("dataset " + id + ": regression has n_classes");
  } else {
    if (!n_classes || *n_classes < 2)
      throw Error("dataset " + id + ": classification needs n_classes >= 2");
  }
}

std::size_t ResultsTable::method_index(const std::string& name) const {
  auto it = std::find(methods.begin(), methods.end(), name);
  if (it == methods.end()) throw Error("unknown method: " + name);
  return static_cast<std::size_t>(it - methods.begin());
}

}  // namespace curvecast

namespace curvecast::io {

namespace {

using json = nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw Error("empty CSV file: " + path.string());
  return rows;
}

double parse_real(const std::string& s, const std::string& where) {
  const char* b = s.data();
  const char* e = b + s.size();
  double v = 0.0;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e)
    throw Error("non-numeric value '" + s + "' in " + where);
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  auto dir = path.parent_path();
  if (dir.empty()) dir = ".";
  auto tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + tmp.string());
    out << content;
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("rename failed for " + path.string() + ": " + ec.message());
  }
}

DatasetSummary load_dataset(const std::filesystem::path& path,
                            const std::map<std::string, ColumnKind>& schema,
                            const std::string& label) {
  auto rows = read_csv(path);
  const auto& header = rows[0];

  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == label) label_idx = i;
  if (label_idx == header.size())
    throw Error("label column '" + label + "' not found in " + path.string());

  for (std::size_t i = 0; i < header.size(); ++i)
    if (!schema.count(header[i]))
      throw Error("header column '" + header[i] + "' missing from schema");

  // Keep only complete rows.
  std::vector<const std::vector<std::string>*> kept;
  std::size_t dropped = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw Error("row " + std::to_string(r) + " has " +
                  std::to_string(rows[r].size()) + " cells, expected " +
                  std::to_string(header.size()));
    bool missing = std::any_of(rows[r].begin(), rows[r].end(),
                               [](const std::string& s) { return s.empty(); });
    if (missing)
      ++dropped;
    else
      kept.push_back(&rows[r]);
  }
  if (kept.empty()) throw Error("all rows dropped in " + path.string());

  DatasetSummary ds;
  ds.id = path.stem().string();
  ds.dropped_rows = dropped;
  ds.n_instances = kept.size();

  auto encode_column = [&](std::size_t col, ColumnKind kind) {
    std::vector<double> vals;
    vals.reserve(kept.size());
    if (kind == ColumnKind::numerical) {
      for (const auto* row : kept)
        vals.push_back(parse_real((*row)[col], "column " + header[col]));
    } else {
      std::unordered_map<std::string, double> codes;
      for (const auto* row : kept) {
        auto [it, inserted] =
            codes.emplace((*row)[col], static_cast<double>(codes.size()));
        vals.push_back(it->second);
      }
    }
    return vals;
  };

  ColumnKind label_kind = schema.at(label);
  ds.labels = encode_column(label_idx, label_kind);
  if (label_kind == ColumnKind::categorical) {
    std::size_t n_classes =
        static_cast<std::size_t>(*std::max_element(ds.labels.begin(), ds.labels.end())) + 1;
    if (n_classes < 2)
      throw Error("label column has a single class in " + path.string());
    ds.n_classes = n_classes;
    ds.task = n_classes == 2 ? Task::binclass : Task::multiclass;
  } else {
    ds.task = Task::regression;
  }

  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i == label_idx) continue;
    Column c;
    c.name = header[i];
    c.kind = schema.at(header[i]);
    c.values = encode_column(i, c.kind);
    ds.columns.push_back(std::move(c));
  }
  ds.n_features = ds.columns.size();
  ds.validate();
  return ds;
}

CurveLoadReport load_curves(const std::filesystem::path& path, std::size_t k) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error("malformed JSON in " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw Error("curve file must be a top-level array");

  CurveLoadReport report;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    auto fail = [&](const std::string& field, const std::string& why) {
      throw Error("curve " + std::to_string(i) + " field '" + field + "': " + why);
    };
    if (!obj.is_object()) fail("(root)", "not an object");
    ValidationCurve c;
    try {
      c.dataset_id = obj.at("dataset_id").get<std::string>();
      c.task = task_from_string(obj.at("task").get<std::string>());
      c.metric = metric_from_string(obj.at("metric").get<std::string>());
      c.values = obj.at("values").get<std::vector<double>>();
    } catch (const json::exception& e) {
      fail("(schema)", e.what());
    }
    for (double v : c.values) {
      if (!std::isfinite(v)) fail("values", "non-finite value");
      if (c.metric == Metric::accuracy && (v < 0.0 || v > 1.0))
        fail("values", "accuracy value " + format_real(v) + " outside [0,1]");
      if (c.metric == Metric::normalized_rmse && v < 0.0)
        fail("values", "negative normalized_rmse");
    }
    if (c.values.size() < k + 1)
      report.rejected_short.push_back(c.dataset_id);
    else
      report.curves.push_back(std::move(c));
  }
  return report;
}

void save_curves(const std::filesystem::path& path,
                 const std::vector<ValidationCurve>& curves) {
  json arr = json::array();
  for (const auto& c : curves) {
    arr.push_back({{"dataset_id", c.dataset_id},
                   {"task", to_string(c.task)},
                   {"metric", to_string(c.metric)},
                   {"values", c.values}});
  }
  write_file_atomic(path, arr.dump(2) + "\n");
}

ResultsTable load_results(const std::filesystem::path& path,
                          const std::filesystem::path& seed_path) {
  auto rows = read_csv(path);
  const auto& header = rows[0];
  if (header.size() < 3 || header[0] != "dataset_id" ||
      header[1] != "higher_is_better")
    throw Error("results CSV must start with dataset_id,higher_is_better");

  ResultsTable t;
  t.methods.assign(header.begin() + 2, header.end());
  std::unordered_set<std::string> seen_ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw Error("results row " + std::to_string(r) + ": expected " +
                  std::to_string(header.size()) + " cells");
    if (!seen_ids.insert(row[0]).second)
      throw Error("duplicate dataset ID: " + row[0]);
    t.datasets.push_back(row[0]);
    t.higher_is_better.push_back(parse_real(row[1], "higher_is_better") != 0.0);
    std::vector<double> vals;
    for (std::size_t c = 2; c < row.size(); ++c) {
      if (row[c].empty())
        throw Error("missing cell at row " + std::to_string(r) + ", column " +
                    header[c]);
      vals.push_back(parse_real(row[c], "row " + std::to_string(r) +
                                            ", column " + header[c]));
    }
    t.values.push_back(std::move(vals));
  }

  if (!seed_path.empty()) {
    auto srows = read_csv(seed_path);
    const auto& sh = srows[0];
    if (sh.size() != 4 || sh[0] != "dataset_id" || sh[1] != "method" ||
        sh[2] != "seed" || sh[3] != "value")
      throw Error("seed CSV must have columns dataset_id,method,seed,value");
    std::unordered_map<std::string, std::size_t> dindex, mindex;
    for (std::size_t i = 0; i < t.datasets.size(); ++i) dindex[t.datasets[i]] = i;
    for (std::size_t i = 0; i < t.methods.size(); ++i) mindex[t.methods[i]] = i;
    t.seeds.assign(t.n_datasets(),
                   std::vector<std::vector<double>>(t.n_methods()));
    for (std::size_t r = 1; r < srows.size(); ++r) {
      const auto& row = srows[r];
      if (row.size() != 4) throw Error("seed row " + std::to_string(r) + ": bad shape");
      auto di = dindex.find(row[0]);
      auto mi = mindex.find(row[1]);
      if (di == dindex.end()) throw Error("seed file: unknown dataset " + row[0]);
      if (mi == mindex.end()) throw Error("seed file: unknown method " + row[1]);
      t.seeds[di->second][mi->second].push_back(parse_real(row[3], "seed value"));
    }
    std::size_t s_count = 0;
    for (std::size_t d = 0; d < t.n_datasets(); ++d) {
      for (std::size_t m = 0; m < t.n_methods(); ++m) {
        const auto& cell = t.seeds[d][m];
        if (cell.empty())
          throw Error("seed file: no seeds for " + t.datasets[d] + "/" + t.methods[m]);
        if (s_count == 0) s_count = cell.size();
        if (cell.size() != s_count)
          throw Error("seed file shape mismatch at " + t.datasets[d] + "/" + t.methods[m]);
        double mean = 0.0;
        for (double v : cell) mean += v;
        mean /= static_cast<double>(cell.size());
        if (std::fabs(mean - t.values[d][m]) > 1e-9)
          throw Error("seed mean mismatch at " + t.datasets[d] + "/" +
                      t.methods[m] + ": " + format_real(mean) + " vs " +
                      format_real(t.values[d][m]));
      }
    }
  }
  return t;
}

namespace {

json meta_record_to_json(const MetaRecord& r) {
  const auto& names = mf::MetaFeatureVector::slot_names();
  json features = json::object();
  for (std::size_t i = 0; i < names.size(); ++i) features[names[i]] = r.slots[i];
  return {{"dataset_id", r.dataset_id},
          {"layout_version", r.layout_version},
          {"features", features}};
}

MetaRecord meta_record_from_json(const json& j) {
  MetaRecord r;
  r.dataset_id = j.at("dataset_id").get<std::string>();
  r.layout_version = j.at("layout_version").get<std::string>();
  const auto& names = mf::MetaFeatureVector::slot_names();
  const auto& features = j.at("features");
  for (std::size_t i = 0; i < names.size(); ++i)
    r.slots[i] = features.at(names[i]).get<double>();
  return r;
}

}  // namespace

void save_meta(const std::filesystem::path& path,
               const std::vector<MetaRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(meta_record_to_json(r));
  write_file_atomic(path, arr.dump(2) + "\n");
}

std::vector<MetaRecord> load_meta(const std::filesystem::path& path) {
  std::vector<MetaRecord> out;
  try {
    if (std::filesystem::is_directory(path)) {
      std::vector<std::filesystem::path> files;
      for (const auto& e : std::filesystem::directory_iterator(path))
        if (e.path().extension() == ".json") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        json doc = json::parse(read_file(f));
        if (doc.is_array())
          for (const auto& j : doc) out.push_back(meta_record_from_json(j));
        else
          out.push_back(meta_record_from_json(doc));
      }
    } else {
      json doc = json::parse(read_file(path));
      if (doc.is_array())
        for (const auto& j : doc) out.push_back(meta_record_from_json(j));
      else
        out.push_back(meta_record_from_json(doc));
    }
  } catch (const json::exception& e) {
    throw Error("malformed meta JSON at " + path.string() + ": " + e.what());
  }
  return out;
}

void save_results(const std::filesystem::path& path, const ResultsTable& table) {
  std::ostringstream out;
  out << "dataset_id,higher_is_better";
  for (const auto& m : table.methods) out << ',' << m;
  out << '\n';
  for (std::size_t d = 0; d < table.n_datasets(); ++d) {
    out << table.datasets[d] << ',' << (table.higher_is_better[d] ? 1 : 0);
    for (double v : table.values[d]) out << ',' << format_real(v);
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace curvecast::io

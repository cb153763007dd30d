#include "l1pda/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string_view>

#include "l1pda/format.hpp"

namespace l1pda {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view raw) {
  std::string_view s = trim(raw);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

// Splits text into records of fields.  Handles quoted fields with
// embedded delimiters/newlines and "" escapes; accepts \n, \r\n and \r
// record separators outside quotes.
std::vector<std::vector<std::string>> parse_delimited(const std::string& text,
                                                      char delimiter) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool any_field = false;  // current record has content or separators

  auto end_field = [&]() {
    record.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&]() {
    if (any_field || !record.empty()) {
      end_field();
      records.push_back(std::move(record));
      record.clear();
    }
    any_field = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"' && trim(field).empty()) {
      in_quotes = true;
      field.clear();  // drop padding before the opening quote
      any_field = true;
    } else if (ch == delimiter) {
      end_field();
      any_field = true;
    } else if (ch == '\n') {
      end_record();
    } else if (ch == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else {
      field += ch;
      any_field = true;
    }
  }
  if (in_quotes) {
    throw CsvError("unterminated quoted field at end of file");
  }
  end_record();
  return records;
}

std::vector<std::vector<std::string>> read_records(const std::string& path, char delimiter) {
  std::string text = read_text_file(path);
  std::vector<std::vector<std::string>> records = parse_delimited(text, delimiter);
  if (records.empty()) {
    throw CsvError("empty file: '" + path + "'");
  }
  return records;
}

std::string clean_name(const std::string& s) { return std::string(trim(s)); }

bool needs_quoting(const std::string& s, char delimiter) {
  if (s.empty()) return false;
  if (s.front() == ' ' || s.back() == ' ') return true;
  return s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string::npos;
}

void write_field(std::string& out, const std::string& s, char delimiter) {
  if (!needs_quoting(s, delimiter)) {
    out += s;
    return;
  }
  out += '"';
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CsvError("cannot open file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot write to '" + path + "'");
  }
  out << content;
  if (!out.good()) {
    throw Error("write failed for '" + path + "'");
  }
}

LabeledDataset load_csv(const std::string& path, const std::string& label_column,
                        char delimiter) {
  const auto records = read_records(path, delimiter);
  const std::vector<std::string>& raw_header = records[0];
  std::vector<std::string> header;
  header.reserve(raw_header.size());
  for (const std::string& name : raw_header) header.push_back(clean_name(name));

  int label_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) {
      label_idx = static_cast<int>(j);
      break;
    }
  }
  if (label_idx < 0) {
    throw CsvError("no column named '" + label_column + "' in '" + path + "'");
  }
  const int p = static_cast<int>(header.size()) - 1;
  if (p < 1) {
    throw CsvError("no feature columns besides '" + label_column + "'");
  }

  const std::size_t n = records.size() - 1;
  LabeledDataset d;
  d.X.resize(static_cast<int>(n), p);
  d.y.reserve(n);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (static_cast<int>(j) != label_idx) d.feature_names.push_back(header[j]);
  }

  std::vector<std::string> seen_labels;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const std::vector<std::string>& row = records[r];
    const std::size_t file_row = r + 1;  // header is row 1
    if (row.size() != header.size()) {
      throw CsvError("row " + std::to_string(file_row) + " has " +
                         std::to_string(row.size()) + " fields, expected " +
                         std::to_string(header.size()),
                     file_row);
    }
    int col_out = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (static_cast<int>(j) == label_idx) continue;
      std::optional<double> value = parse_double(row[j]);
      if (!value) {
        throw CsvError("cell '" + row[j] + "' in row " + std::to_string(file_row) +
                           ", column '" + header[j] + "' is not numeric",
                       file_row, j + 1);
      }
      d.X(static_cast<int>(r) - 1, col_out++) = *value;
    }
    const std::string label = clean_name(row[label_idx]);
    int cls = 0;
    for (std::size_t k = 0; k < seen_labels.size(); ++k) {
      if (seen_labels[k] == label) cls = static_cast<int>(k) + 1;
    }
    if (cls == 0) {
      if (seen_labels.size() == 2) {
        throw CsvError("label column '" + label_column +
                           "' has more than 2 distinct values ('" + seen_labels[0] +
                           "', '" + seen_labels[1] + "', '" + label + "' in row " +
                           std::to_string(file_row) + ")",
                       file_row, static_cast<std::size_t>(label_idx) + 1);
      }
      seen_labels.push_back(label);
      cls = static_cast<int>(seen_labels.size());
    }
    d.y.push_back(cls);
  }
  for (std::size_t k = 0; k < seen_labels.size(); ++k) d.label_names[k] = seen_labels[k];
  validate_dataset(d);
  return d;
}

FeatureTable load_feature_csv(const std::string& path, char delimiter) {
  const auto records = read_records(path, delimiter);
  FeatureTable table;
  for (const std::string& name : records[0]) table.names.push_back(clean_name(name));
  const int p = static_cast<int>(table.names.size());
  table.X.resize(static_cast<int>(records.size()) - 1, p);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const std::size_t file_row = r + 1;
    if (static_cast<int>(records[r].size()) != p) {
      throw CsvError("row " + std::to_string(file_row) + " has " +
                         std::to_string(records[r].size()) + " fields, expected " +
                         std::to_string(p),
                     file_row);
    }
    for (int j = 0; j < p; ++j) {
      std::optional<double> value = parse_double(records[r][j]);
      if (!value) {
        throw CsvError("cell '" + records[r][j] + "' in row " + std::to_string(file_row) +
                           ", column '" + table.names[j] + "' is not numeric",
                       file_row, static_cast<std::size_t>(j) + 1);
      }
      table.X(static_cast<int>(r) - 1, j) = *value;
    }
  }
  return table;
}

void save_csv(const LabeledDataset& d, const std::string& path,
              const std::string& label_column, char delimiter) {
  validate_dataset(d);
  std::string out;
  const int p = d.p();
  std::vector<std::string> names = d.feature_names;
  if (names.empty()) {
    for (int j = 1; j <= p; ++j) names.push_back("x" + std::to_string(j));
  }
  if (static_cast<int>(names.size()) != p) {
    throw Error("feature name count does not match column count");
  }
  for (int j = 0; j < p; ++j) {
    write_field(out, names[j], delimiter);
    out += delimiter;
  }
  write_field(out, label_column, delimiter);
  out += '\n';
  for (int i = 0; i < d.n(); ++i) {
    for (int j = 0; j < p; ++j) {
      out += detail::fmt_exact(d.X(i, j));
      out += delimiter;
    }
    write_field(out, d.label_names[d.y[i] - 1], delimiter);
    out += '\n';
  }
  write_text_file(path, out);
}

std::string dataset_hash(const LabeledDataset& d) {
  std::string bytes = "v1|" + std::to_string(d.n()) + "|" + std::to_string(d.p()) + "|";
  for (const std::string& name : d.feature_names) {
    bytes += name;
    bytes += '|';
  }
  for (int i = 0; i < d.n(); ++i) {
    for (int j = 0; j < d.p(); ++j) {
      bytes += detail::fmt_exact(d.X(i, j));
      bytes += ',';
    }
    bytes += d.label_names[d.y[i] - 1];
    bytes += '\n';
  }
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a64:") + buf;
}

namespace {

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

nlohmann::json matrix_to_json(const SymMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < m.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Vector vector_from_json(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array() || arr.empty()) {
    throw ModelFormatError(std::string("model field '") + what + "' must be a nonempty array");
  }
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw ModelFormatError(std::string("model field '") + what + "' has a non-numeric entry");
    }
    v(static_cast<int>(i)) = arr[i].get<double>();
  }
  return v;
}

SymMatrix matrix_from_json(const nlohmann::json& rows, int p, const char* what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != p) {
    throw ModelFormatError(std::string("model field '") + what + "' must be a " +
                           std::to_string(p) + "x" + std::to_string(p) + " array");
  }
  Matrix m(p, p);
  for (int i = 0; i < p; ++i) {
    const nlohmann::json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != p) {
      throw ModelFormatError(std::string("model field '") + what + "' must be a " +
                             std::to_string(p) + "x" + std::to_string(p) + " array");
    }
    for (int j = 0; j < p; ++j) {
      if (!row[j].is_number()) {
        throw ModelFormatError(std::string("model field '") + what +
                               "' has a non-numeric entry");
      }
      m(i, j) = row[j].get<double>();
    }
  }
  return SymMatrix(m);
}

const nlohmann::json& require_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ModelFormatError(std::string("model file is missing field '") + key + "'");
  }
  return *it;
}

}  // namespace

nlohmann::json model_to_json(const PdaModel& m, const nlohmann::json& provenance) {
  nlohmann::json j;
  j["format_version"] = kModelFormatVersion;
  j["method"] = m.method;
  if (m.method == "rda") {
    j["alpha"] = m.alpha.value();
  } else if (std::isinf(m.lambda)) {
    j["lambda"] = nullptr;
  } else {
    j["lambda"] = m.lambda;
  }
  j["priors"] = {m.priors[0], m.priors[1]};
  j["means"] = {vector_to_json(m.mu1), vector_to_json(m.mu2)};
  j["precisions"] = {matrix_to_json(m.P1), matrix_to_json(m.P2)};
  j["logdets"] = {m.logdet_P1, m.logdet_P2};
  j["label_map"] = {m.label_names[0], m.label_names[1]};
  j["provenance"] = provenance;
  return j;
}

LoadedModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ModelFormatError("model file must be a JSON object");
  }
  const nlohmann::json& version = require_field(j, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw ModelFormatError("unsupported format_version " + version.dump() + ", expected " +
                           std::to_string(kModelFormatVersion));
  }
  LoadedModel loaded;
  PdaModel& m = loaded.model;
  m.method = require_field(j, "method").get<std::string>();
  if (m.method != "lda" && m.method != "qda" && m.method != "rda" && m.method != "l1pda") {
    throw ModelFormatError("unknown method '" + m.method + "'");
  }

  const nlohmann::json& priors = require_field(j, "priors");
  if (!priors.is_array() || priors.size() != 2) {
    throw ModelFormatError("model field 'priors' must hold two values");
  }
  m.priors = {priors[0].get<double>(), priors[1].get<double>()};
  if (!(m.priors[0] > 0.0) || !(m.priors[1] > 0.0) ||
      std::abs(m.priors[0] + m.priors[1] - 1.0) > 1e-12) {
    throw ModelFormatError("priors must be positive and sum to 1");
  }

  const nlohmann::json& means = require_field(j, "means");
  if (!means.is_array() || means.size() != 2) {
    throw ModelFormatError("model field 'means' must hold two vectors");
  }
  m.mu1 = vector_from_json(means[0], "means");
  m.mu2 = vector_from_json(means[1], "means");
  const int p = static_cast<int>(m.mu1.size());
  if (m.mu2.size() != p) {
    throw ModelFormatError("class means have different dimensions");
  }

  const nlohmann::json& precisions = require_field(j, "precisions");
  if (!precisions.is_array() || precisions.size() != 2) {
    throw ModelFormatError("model field 'precisions' must hold two matrices");
  }
  m.P1 = matrix_from_json(precisions[0], p, "precisions");
  m.P2 = matrix_from_json(precisions[1], p, "precisions");

  const nlohmann::json& logdets = require_field(j, "logdets");
  if (!logdets.is_array() || logdets.size() != 2) {
    throw ModelFormatError("model field 'logdets' must hold two values");
  }
  m.logdet_P1 = logdets[0].get<double>();
  m.logdet_P2 = logdets[1].get<double>();
  for (int k = 0; k < 2; ++k) {
    const SymMatrix& P = (k == 0) ? m.P1 : m.P2;
    const double stored = (k == 0) ? m.logdet_P1 : m.logdet_P2;
    double recomputed = 0.0;
    try {
      recomputed = log_det(P);
    } catch (const NotPositiveDefiniteError& e) {
      throw ModelFormatError(std::string("precision matrix is not positive definite: ") +
                             e.what());
    }
    if (std::abs(stored - recomputed) > 1e-6 * std::max(1.0, std::abs(stored))) {
      throw ModelFormatError("stored logdets are inconsistent with the precisions");
    }
  }

  const nlohmann::json& labels = require_field(j, "label_map");
  if (!labels.is_array() || labels.size() != 2) {
    throw ModelFormatError("model field 'label_map' must hold two strings");
  }
  m.label_names = {labels[0].get<std::string>(), labels[1].get<std::string>()};

  if (m.method == "rda") {
    const nlohmann::json& alpha = require_field(j, "alpha");
    m.alpha = alpha.get<double>();
    if (!(*m.alpha >= 0.0 && *m.alpha <= 1.0)) {
      throw ModelFormatError("alpha must lie in [0, 1]");
    }
    m.lambda = 0.0;
  } else {
    const nlohmann::json& lambda = require_field(j, "lambda");
    if (lambda.is_null()) {
      m.lambda = std::numeric_limits<double>::infinity();
    } else {
      m.lambda = lambda.get<double>();
      if (!(m.lambda >= 0.0)) {
        throw ModelFormatError("lambda must be nonnegative");
      }
    }
  }

  if (auto it = j.find("provenance"); it != j.end()) {
    loaded.provenance = *it;
  }
  return loaded;
}

void save_model(const std::string& path, const PdaModel& m,
                const nlohmann::json& provenance) {
  write_text_file(path, model_to_json(m, provenance).dump(2) + "\n");
}

LoadedModel load_model(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const CsvError& e) {
    throw ModelFormatError(e.what());
  }
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw ModelFormatError("model file '" + path + "' is not valid JSON");
  }
  return model_from_json(j);
}

nlohmann::json cv_report_json(const CvReport& r, const std::string& dataset_digest) {
  nlohmann::json j;
  j["report"] = "cv";
  j["format_version"] = 1;
  j["method"] = r.method;
  j["folds"] = r.folds;
  j["seed"] = r.seed;
  j["grid"] = r.grid;
  j["mean_accuracy"] = r.mean_accuracy;
  j["std_error"] = r.std_error;
  j["unconverged_folds"] = r.unconverged_folds;
  j["best_index"] = r.best_index;
  j["best_value"] = r.grid[r.best_index];
  j["selection_rule"] = r.selection_rule;
  j["dataset_hash"] = dataset_digest;
  return j;
}

nlohmann::json experiment_report_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["report"] = "simulate";
  j["format_version"] = 1;
  j["design"] = {{"p", r.design.p},
                 {"n_per_class", r.design.n_per_class},
                 {"c", r.design.c},
                 {"seed", r.design.seed}};
  j["reps"] = r.reps;
  j["seed_rule"] = r.seed_rule;
  nlohmann::json methods = nlohmann::json::array();
  for (const MethodSummary& s : r.methods) {
    methods.push_back({{"method", s.method},
                       {"mean_accuracy", s.mean_accuracy},
                       {"se_accuracy", s.se_accuracy},
                       {"mean_auc", s.mean_auc},
                       {"se_auc", s.se_auc}});
  }
  j["methods"] = methods;
  j["l1pda_best_index"] = r.l1pda_best_index;
  j["rda_best_index"] = r.rda_best_index;
  return j;
}

nlohmann::json kkt_report_json(const KktReport& r) {
  nlohmann::json j;
  j["report"] = "kkt";
  j["format_version"] = 1;
  j["lambda"] = r.lambda;
  j["stationarity_inf_norm"] = r.stationarity_inf_norm;
  j["stationarity_max_violation"] = r.stationarity_max_violation;
  j["sign_condition_violations"] = r.sign_condition_violations;
  j["pooled_residual"] = r.pooled_residual;
  j["nnz_delta"] = r.nnz_delta;
  j["stationarity_ok"] = r.stationarity_ok;
  j["sign_ok"] = r.sign_ok;
  j["pooled_ok"] = r.pooled_ok;
  return j;
}

std::string path_diagnostics_csv(const PathFit& fit, double zero_tol) {
  std::string out =
      "index,lambda,converged,iterations,primal_residual,dual_residual,objective,"
      "nnz_delta\n";
  for (std::size_t k = 0; k < fit.results.size(); ++k) {
    const SolveResult& r = fit.results[k];
    const Matrix delta = 0.5 * (r.A.mat() - r.B.mat());
    const int nnz = static_cast<int>((delta.cwiseAbs().array() > zero_tol).count());
    out += std::to_string(k);
    out += ',';
    out += detail::fmt_exact(fit.grid.values[k]);
    out += ',';
    out += r.converged ? "true" : "false";
    out += ',';
    out += std::to_string(r.iterations);
    out += ',';
    out += detail::fmt_exact(r.primal_residual);
    out += ',';
    out += detail::fmt_exact(r.dual_residual);
    out += ',';
    out += detail::fmt_exact(r.objective);
    out += ',';
    out += std::to_string(nnz);
    out += '\n';
  }
  return out;
}

}  // namespace l1pda

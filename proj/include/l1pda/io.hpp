#ifndef L1PDA_IO_HPP
#define L1PDA_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "l1pda/simulate.hpp"

namespace l1pda {

// Reads a delimited text file with a header row and RFC-style quoting
// (double quotes, "" escapes, quoted fields may contain delimiters and
// newlines).  All non-label columns must be numeric; the label column
// must take exactly two distinct values, mapped to classes in order of
// first appearance.  Errors name the offending cell by row (counting
// the header as row 1) and column.
LabeledDataset load_csv(const std::string& path, const std::string& label_column,
                        char delimiter = ',');

// A fully numeric table (no label column), e.g. prediction input.
struct FeatureTable {
  Matrix X;
  std::vector<std::string> names;
};
FeatureTable load_feature_csv(const std::string& path, char delimiter = ',');

// Writes d so that load_csv(save_csv(d)) reproduces it exactly
// (shortest round-trip decimal for every value).
void save_csv(const LabeledDataset& d, const std::string& path,
              const std::string& label_column = "label", char delimiter = ',');

// FNV-1a 64-bit content digest, stored in model files for provenance.
std::string dataset_hash(const LabeledDataset& d);

inline constexpr int kModelFormatVersion = 1;

// Model files are JSON with bit-exact numeric round-trips.  lambda is
// null for LDA (the +infinity sentinel); RDA stores alpha instead.
nlohmann::json model_to_json(const PdaModel& m, const nlohmann::json& provenance);

struct LoadedModel {
  PdaModel model;
  nlohmann::json provenance;
};
LoadedModel model_from_json(const nlohmann::json& j);

void save_model(const std::string& path, const PdaModel& m,
                const nlohmann::json& provenance = nlohmann::json::object());
LoadedModel load_model(const std::string& path);

// Deterministic report serializers used by the command-line tool.
nlohmann::json cv_report_json(const CvReport& r, const std::string& dataset_digest);
nlohmann::json experiment_report_json(const ExperimentReport& r);
nlohmann::json kkt_report_json(const KktReport& r);

// Per-lambda diagnostics table: index, lambda, converged, iterations,
// residuals, objective, and the count of precision-difference entries
// above zero_tol.
std::string path_diagnostics_csv(const PathFit& fit, double zero_tol = 1e-3);

// Whole-file helpers (throw on failure).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace l1pda

#endif  // L1PDA_IO_HPP

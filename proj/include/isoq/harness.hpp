#pragma once

#include "isoq/corpus.hpp"
#include "isoq/functionals.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace isoq {

enum class RowStatus { Ok, Violation, Error };

std::string status_name(RowStatus status);

struct CorpusRow {
  std::string id;
  std::string family;
  std::string kind;
  int nodes = 0;
  RowStatus status = RowStatus::Ok;
  std::string message;  ///< violations or the error text, '; '-separated
  /// ‖u‖²_{W^{1,2}} and ‖u‖_{W^{1,∞}} of the normalized radial function
  /// (planar radial graphs only).
  std::optional<double> W12;
  std::optional<double> W1inf;
  std::optional<FunctionalReport> report;
};

/// Evaluates every corpus entry in parallel; row i belongs to entry i for any
/// thread count. A shape that throws becomes an Error row.
std::vector<CorpusRow> run_corpus(const std::vector<CorpusEntry>& entries, const EvalOptions& options = {},
                                  const PanelTolerances& tolerances = {}, int threads = 0);

/// Columns before the fixed report columns.
const std::vector<std::string>& corpus_prefix_columns();

/// Header plus one line per row, LF endings, RFC 4180 quoting where needed.
void write_corpus_csv(std::ostream& out, const std::vector<CorpusRow>& rows);

/// Parsed CSV: header names mapped to field text. Throws ValidationError on
/// ragged rows or a missing header.
using CsvRecord = std::map<std::string, std::string>;
std::vector<CsvRecord> read_csv(std::istream& in);

struct ConstantsOptions {
  double min_deficit = 1e-10;       ///< rows with smaller D carry no ratio
  double nearly_spherical = 0.1;    ///< W^{1,∞} cutoff of the sub-corpus
  int worst_offenders = 5;
};

/// Empirical constants over the valid rows of a corpus CSV:
/// C_main, C0, C_prop (maxima with their shape ids), the Fuglede minimum
/// D / ‖u‖²_{W^{1,2}}, the top A²/D offenders, N vs 2N deltas for ids seen
/// at both resolutions, and α²/D of the smallest mode-2 perturbation
/// against 32/(3π). Throws ValidationError when no row has D > min_deficit.
nlohmann::json estimate_constants(const std::vector<CsvRecord>& rows, const ConstantsOptions& options = {});

struct RefinementRow {
  int nodes = 0;
  double P = 0.0;
  double gamma = 0.0;
  double beta2 = 0.0;
  double residual = 0.0;  ///< |beta_direct² - beta²|
  // observed order against the previous row, NaN at the roundoff floor
  double order_P = 0.0;
  double order_gamma = 0.0;
  double order_beta2 = 0.0;
  double order_residual = 0.0;
};

struct RefinementTable {
  std::vector<RefinementRow> rows;
  /// Errors are taken against these when given, else against the finest row.
  std::optional<double> reference_P;
  std::optional<double> reference_gamma;
  double observed_order_P = 0.0;  ///< last finite entry of each order column
  double observed_order_gamma = 0.0;
  double observed_order_beta2 = 0.0;
  double observed_order_residual = 0.0;
};

/// Evaluates the shape at each N (ascending, else ValidationError).
RefinementTable refinement_study(const ShapeRep& shape, const std::vector<int>& nodes,
                                 std::optional<double> reference_P = std::nullopt,
                                 std::optional<double> reference_gamma = std::nullopt,
                                 const EvalOptions& options = {}, int threads = 0);

nlohmann::json to_json(const RefinementTable& table);

}  // namespace isoq

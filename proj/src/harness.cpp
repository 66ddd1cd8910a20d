#include "isoq/harness.hpp"

#include "isoq/geometry.hpp"
#include "isoq/nearly_spherical.hpp"
#include "isoq/parallel.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace isoq {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  if (!std::isfinite(x)) return "";
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string quoted(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

/// Splits one logical CSV record; quoted fields may span lines.
bool next_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted_field = false, any = false;
  for (int c; (c = in.get()) != EOF;) {
    any = true;
    if (quoted_field) {
      if (c == '"') {
        if (in.peek() == '"') {
          field += '"';
          in.get();
        } else {
          quoted_field = false;
        }
      } else {
        field += static_cast<char>(c);
      }
    } else if (c == '"') {
      quoted_field = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else if (c != '\r') {
      field += static_cast<char>(c);
    }
  }
  if (quoted_field) throw ValidationError("csv: unterminated quoted field");
  if (any) fields.push_back(std::move(field));
  return any;
}

double field(const CsvRecord& row, const std::string& key) {
  const auto it = row.find(key);
  if (it == row.end() || it->second.empty()) return std::nan("");
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    return used == it->second.size() ? v : std::nan("");
  } catch (const std::exception&) {
    return std::nan("");
  }
}

std::string text(const CsvRecord& row, const std::string& key) {
  const auto it = row.find(key);
  return it == row.end() ? std::string() : it->second;
}

struct Extremum {
  double value = std::nan("");
  std::string id;
  int nodes = 0;

  void offer(double v, const CsvRecord& row, bool maximize) {
    if (!std::isfinite(v)) return;
    if (std::isnan(value) || (maximize ? v > value : v < value)) {
      value = v;
      id = text(row, "id");
      nodes = static_cast<int>(field(row, "N"));
    }
  }

  json to_json() const {
    if (std::isnan(value)) return nullptr;
    return json{{"value", value}, {"id", id}, {"N", nodes}};
  }
};

bool is_mode2_planar(const std::string& id) {
  if (id.rfind("perturbed-ball/", 0) != 0) return false;
  auto has = [&](const std::string& token) {
    const auto pos = id.find(token);
    return pos != std::string::npos &&
           (pos + token.size() == id.size() || id[pos + token.size()] == '/');
  };
  return has("/mode=2") && (id.find("/dim=") == std::string::npos || has("/dim=2"));
}

double relative_change(double a, double b) { return std::abs(b - a) / std::max(std::abs(a), 1e-300); }

double observed_order(double e0, double e1, int n0, int n1, double floor) {
  if (!(e0 > floor) || !(e1 > floor)) return std::nan("");
  return std::log(e0 / e1) / std::log(static_cast<double>(n1) / n0);
}

double last_finite(const std::vector<RefinementRow>& rows, double RefinementRow::*member) {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it)
    if (std::isfinite((*it).*member)) return (*it).*member;
  return std::nan("");
}

}  // namespace

std::string status_name(RowStatus status) {
  switch (status) {
    case RowStatus::Ok: return "ok";
    case RowStatus::Violation: return "violation";
    case RowStatus::Error: return "error";
  }
  return "error";
}

std::vector<CorpusRow> run_corpus(const std::vector<CorpusEntry>& entries, const EvalOptions& options,
                                  const PanelTolerances& tolerances, int threads) {
  return parallel_map(entries.size(), threads, [&](std::size_t i) {
    const CorpusEntry& e = entries[i];
    CorpusRow row;
    row.id = e.id;
    row.family = e.family;
    row.nodes = e.nodes;
    if (!e.shape) {
      row.status = RowStatus::Error;
      row.message = e.error;
      return row;
    }
    row.kind = kind_name(e.shape->kind());
    try {
      EvalOptions o = options;
      o.nodes = e.nodes;
      row.report = inequality_panel(*e.shape, o);
      const std::vector<std::string> v = panel_violations(*row.report, tolerances);
      if (!v.empty()) {
        row.status = RowStatus::Violation;
        row.message = join(v, "; ");
      }
      if (e.shape->kind() == ShapeKind::RadialGraph2D) {
        const NormalizedSphericalSet s = normalize(SphericalFunction(e.shape->as_radial2d().u));
        const SobolevNorms norms = sobolev_norms(s.u);
        row.W12 = norms.W12();
        row.W1inf = norms.W1inf;
      }
    } catch (const std::exception& ex) {
      row.status = RowStatus::Error;
      row.message = ex.what();
      row.report.reset();
    }
    return row;
  });
}

const std::vector<std::string>& corpus_prefix_columns() {
  static const std::vector<std::string> columns{"id", "family", "kind", "N", "status", "message", "W12", "W1inf"};
  return columns;
}

void write_corpus_csv(std::ostream& out, const std::vector<CorpusRow>& rows) {
  std::vector<std::string> header = corpus_prefix_columns();
  const std::vector<std::string>& fixed = report_csv_columns();
  header.insert(header.end(), fixed.begin(), fixed.end());
  out << join(header, ",") << '\n';
  for (const CorpusRow& r : rows) {
    std::vector<std::string> f{quoted(r.id),
                               r.family,
                               r.kind,
                               std::to_string(r.nodes),
                               status_name(r.status),
                               quoted(r.message),
                               r.W12 ? fmt(*r.W12) : "",
                               r.W1inf ? fmt(*r.W1inf) : ""};
    if (r.report) {
      const std::vector<std::string> rep = report_csv_fields(*r.report);
      f.insert(f.end(), rep.begin(), rep.end());
    } else {
      f.resize(header.size());
    }
    out << join(f, ",") << '\n';
  }
}

std::vector<CsvRecord> read_csv(std::istream& in) {
  std::vector<std::string> header, fields;
  if (!next_record(in, header) || header.empty() || (header.size() == 1 && header[0].empty()))
    throw ValidationError("csv: missing header row");
  std::vector<CsvRecord> out;
  for (int line = 2; next_record(in, fields); ++line) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != header.size())
      throw ValidationError("csv: record " + std::to_string(line) + " has " + std::to_string(fields.size()) +
                            " fields, header has " + std::to_string(header.size()));
    CsvRecord r;
    for (std::size_t i = 0; i < header.size(); ++i) r[header[i]] = fields[i];
    out.push_back(std::move(r));
  }
  return out;
}

json estimate_constants(const std::vector<CsvRecord>& rows, const ConstantsOptions& options) {
  std::vector<const CsvRecord*> valid;
  for (const CsvRecord& r : rows) {
    const std::string status = text(r, "status");
    if (!status.empty() && status != "ok" && status != "violation") continue;
    if (field(r, "D") > options.min_deficit) valid.push_back(&r);
  }
  if (valid.empty()) throw ValidationError("no valid rows: every row has D <= " + fmt(options.min_deficit));

  Extremum c_main, c_zero, c_prop, fuglede;
  for (const CsvRecord* r : valid) {
    const double a2d = field(*r, "ratio_A2_D");
    c_main.offer(a2d, *r, true);
    c_prop.offer(field(*r, "ratio_prop"), *r, true);
    const double w1inf = field(*r, "W1inf");
    if (w1inf <= options.nearly_spherical) {
      c_zero.offer(a2d, *r, true);
      fuglede.offer(field(*r, "D") / field(*r, "W12"), *r, false);
    }
  }

  std::vector<const CsvRecord*> ranked;
  for (const CsvRecord* r : valid)
    if (std::isfinite(field(*r, "ratio_A2_D"))) ranked.push_back(r);
  std::stable_sort(ranked.begin(), ranked.end(), [](const CsvRecord* a, const CsvRecord* b) {
    return field(*a, "ratio_A2_D") > field(*b, "ratio_A2_D");
  });
  json worst = json::array();
  for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < options.worst_offenders; ++i) {
    const CsvRecord& r = *ranked[i];
    worst.push_back({{"id", text(r, "id")},
                     {"N", static_cast<int>(field(r, "N"))},
                     {"ratio_A2_D", number(field(r, "ratio_A2_D"))},
                     {"ratio_prop", number(field(r, "ratio_prop"))},
                     {"D", number(field(r, "D"))}});
  }

  // same id at N and 2N
  json deltas = json::array();
  double max_delta_A2_D = 0.0, max_delta_prop = 0.0;
  for (const CsvRecord* lo : valid)
    for (const CsvRecord* hi : valid) {
      if (text(*lo, "id") != text(*hi, "id") || field(*hi, "N") != 2 * field(*lo, "N")) continue;
      const double d1 = relative_change(field(*lo, "ratio_A2_D"), field(*hi, "ratio_A2_D"));
      const double d2 = relative_change(field(*lo, "ratio_prop"), field(*hi, "ratio_prop"));
      if (std::isfinite(d1)) max_delta_A2_D = std::max(max_delta_A2_D, d1);
      if (std::isfinite(d2)) max_delta_prop = std::max(max_delta_prop, d2);
      deltas.push_back({{"id", text(*lo, "id")},
                        {"N", static_cast<int>(field(*lo, "N"))},
                        {"N2", static_cast<int>(field(*hi, "N"))},
                        {"rel_delta_A2_D", number(d1)},
                        {"rel_delta_prop", number(d2)}});
    }

  // α²/D of the smallest mode-2 perturbation, finest N
  const double target = 32.0 / (3.0 * kPi);
  const CsvRecord* smallest = nullptr;
  for (const CsvRecord* r : valid) {
    if (!is_mode2_planar(text(*r, "id")) || !std::isfinite(field(*r, "alpha"))) continue;
    if (!smallest || field(*r, "D") < field(*smallest, "D") ||
        (field(*r, "D") == field(*smallest, "D") && field(*r, "N") > field(*smallest, "N")))
      smallest = r;
  }
  json sanity = nullptr;
  if (smallest) {
    const double a = field(*smallest, "alpha");
    const double value = a * a / field(*smallest, "D");
    sanity = {{"id", text(*smallest, "id")},
              {"N", static_cast<int>(field(*smallest, "N"))},
              {"alpha2_over_D", value},
              {"target", target},
              {"relative_error", std::abs(value - target) / target},
              {"C_main_at_least", c_main.value >= value}};
  }

  return json{{"rows", rows.size()},
              {"valid_rows", valid.size()},
              {"C_main", c_main.to_json()},
              {"C0", c_zero.to_json()},
              {"C_prop", c_prop.to_json()},
              {"fuglede_c", fuglede.to_json()},
              {"worst_offenders", worst},
              {"resolution_deltas", deltas},
              {"max_rel_delta_A2_D", max_delta_A2_D},
              {"max_rel_delta_prop", max_delta_prop},
              {"mode2_lower_bound", sanity}};
}

RefinementTable refinement_study(const ShapeRep& shape, const std::vector<int>& nodes,
                                 std::optional<double> reference_P, std::optional<double> reference_gamma,
                                 const EvalOptions& options, int threads) {
  if (nodes.empty()) throw ValidationError("refinement: empty N list");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] < 16) throw ValidationError("refinement: N must be at least 16");
    if (i && nodes[i] <= nodes[i - 1]) throw ValidationError("refinement: N list must be ascending");
  }

  RefinementTable t;
  t.reference_P = reference_P;
  t.reference_gamma = reference_gamma;
  t.rows = parallel_map(nodes.size(), threads, [&](std::size_t i) {
    EvalOptions o = options;
    o.nodes = nodes[i];
    const BetaResult b = beta(shape, o);
    RefinementRow row;
    row.nodes = nodes[i];
    row.P = perimeter(shape, nodes[i]);
    row.gamma = b.center_search.gamma;
    row.beta2 = b.beta * b.beta;
    row.residual = b.residual;
    return row;
  });

  const RefinementRow& finest = t.rows.back();
  const double ref_P = reference_P.value_or(finest.P);
  const double ref_gamma = reference_gamma.value_or(finest.gamma);
  const double ref_beta2 = finest.beta2;
  const double floor = 1e-13 * std::max(1.0, std::abs(ref_P));
  auto& rows = t.rows;
  rows.front().order_P = rows.front().order_gamma = rows.front().order_beta2 = rows.front().order_residual =
      std::nan("");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const RefinementRow& a = rows[i - 1];
    RefinementRow& b = rows[i];
    b.order_P = observed_order(std::abs(a.P - ref_P), std::abs(b.P - ref_P), a.nodes, b.nodes, floor);
    b.order_gamma =
        observed_order(std::abs(a.gamma - ref_gamma), std::abs(b.gamma - ref_gamma), a.nodes, b.nodes, floor);
    b.order_beta2 =
        observed_order(std::abs(a.beta2 - ref_beta2), std::abs(b.beta2 - ref_beta2), a.nodes, b.nodes, floor);
    b.order_residual = observed_order(a.residual, b.residual, a.nodes, b.nodes, floor);
  }
  t.observed_order_P = last_finite(rows, &RefinementRow::order_P);
  t.observed_order_gamma = last_finite(rows, &RefinementRow::order_gamma);
  t.observed_order_beta2 = last_finite(rows, &RefinementRow::order_beta2);
  t.observed_order_residual = last_finite(rows, &RefinementRow::order_residual);
  return t;
}

json to_json(const RefinementTable& t) {
  json rows = json::array();
  for (const RefinementRow& r : t.rows) {
    rows.push_back({{"N", r.nodes},
                    {"P", r.P},
                    {"gamma", r.gamma},
                    {"beta2", r.beta2},
                    {"residual", r.residual},
                    {"order_P", number(r.order_P)},
                    {"order_gamma", number(r.order_gamma)},
                    {"order_beta2", number(r.order_beta2)},
                    {"order_residual", number(r.order_residual)}});
  }
  return json{{"rows", rows},
              {"reference_P", t.reference_P ? json(*t.reference_P) : json(nullptr)},
              {"reference_gamma", t.reference_gamma ? json(*t.reference_gamma) : json(nullptr)},
              {"observed_order",
               {{"P", number(t.observed_order_P)},
                {"gamma", number(t.observed_order_gamma)},
                {"beta2", number(t.observed_order_beta2)},
                {"residual", number(t.observed_order_residual)}}}};
}

}  // namespace isoq

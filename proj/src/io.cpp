#include "vmreval/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "vmreval/errors.hpp"

namespace vmreval {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open '" + path.string() + "' for reading");
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps line endings LF
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

ordered_json parse_line(const std::string& line,
                        const std::filesystem::path& path, std::size_t lineno) {
  ordered_json value = ordered_json::parse(line, nullptr, false);
  if (value.is_discarded() || !value.is_object()) {
    throw ParseError(path.string(), lineno, "not a JSON object");
  }
  return value;
}

std::string require_string(const ordered_json& object, const char* key,
                           const std::filesystem::path& path,
                           std::size_t lineno) {
  if (!object.contains(key) || !object[key].is_string()) {
    throw ParseError(path.string(), lineno,
                     std::string("missing string field '") + key + "'");
  }
  return object[key].get<std::string>();
}

double require_number(const ordered_json& object, const char* key,
                      const std::filesystem::path& path, std::size_t lineno) {
  if (!object.contains(key) || !object[key].is_number()) {
    throw ParseError(path.string(), lineno,
                     std::string("missing numeric field '") + key + "'");
  }
  return object[key].get<double>();
}

Interval read_interval(const ordered_json& object, const std::string& query_id,
                       const std::filesystem::path& path, std::size_t lineno) {
  const double start = require_number(object, "start", path, lineno);
  const double end = require_number(object, "end", path, lineno);
  if (!(end >= start)) {
    throw InvalidInterval("query '" + query_id + "': end " +
                          std::to_string(end) + " lies before start " +
                          std::to_string(start));
  }
  return Interval(start, end);
}

// Full round-trip precision; %.17g distinguishes every double.
std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string csv_cell(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) {
    return text;
  }
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') {
      quoted += '"';
    }
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string csv_number(double value) {
  if (std::isnan(value)) {
    return "";  // missing, never fabricated
  }
  return format_number(value);
}

void dump_json(const ordered_json& j, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  finish_output(out, path);
}

ordered_json spec_names(const std::vector<MeasureSpec>& specs) {
  ordered_json names = ordered_json::array();
  for (const MeasureSpec& spec : specs) {
    names.push_back(spec.name());
  }
  return names;
}

// NaN is not representable in JSON; nlohmann would emit the literal
// `null`-incompatible token, so map it explicitly.
ordered_json json_number(double value) {
  if (std::isnan(value)) {
    return nullptr;
  }
  return value;
}

}  // namespace

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  GroundTruth gt;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) {
      continue;
    }
    const ordered_json object = parse_line(line, path, lineno);
    const std::string query_id =
        require_string(object, "query_id", path, lineno);
    const Interval segment = read_interval(object, query_id, path, lineno);
    std::optional<double> duration;
    if (object.contains("duration")) {
      duration = require_number(object, "duration", path, lineno);
    }
    gt.add(query_id, segment, duration);
  }
  return gt;
}

Run load_run(const std::filesystem::path& path) {
  return load_run(path, path.stem().string());
}

Run load_run(const std::filesystem::path& path, const std::string& system_id) {
  std::ifstream in = open_input(path);
  Run run;
  run.system_id = system_id;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) {
      continue;
    }
    const ordered_json object = parse_line(line, path, lineno);
    const std::string query_id =
        require_string(object, "query_id", path, lineno);
    if (!object.contains("moments") || !object["moments"].is_array()) {
      throw ParseError(path.string(), lineno, "missing array field 'moments'");
    }

    std::vector<std::pair<Interval, double>> scored;
    std::size_t with_score = 0;
    for (const ordered_json& entry : object["moments"]) {
      if (!entry.is_object()) {
        throw ParseError(path.string(), lineno, "moment is not an object");
      }
      const Interval moment = read_interval(entry, query_id, path, lineno);
      double score = 0.0;
      if (entry.contains("score")) {
        score = require_number(entry, "score", path, lineno);
        ++with_score;
      }
      scored.emplace_back(moment, score);
    }
    if (with_score != 0 && with_score != scored.size()) {
      throw ParseError(path.string(), lineno,
                       "either all moments carry scores or none");
    }
    if (with_score == scored.size() && !scored.empty()) {
      std::stable_sort(scored.begin(), scored.end(),
                       [](const auto& a, const auto& b) {
                         return a.second > b.second;
                       });
    }

    RankedList list;
    list.query_id = query_id;
    list.moments.reserve(scored.size());
    for (const auto& [moment, score] : scored) {
      (void)score;
      list.moments.push_back(moment);
    }
    if (!run.lists.emplace(query_id, std::move(list)).second) {
      throw DuplicateKey("query '" + query_id + "' appears twice in '" +
                         path.string() + "'");
    }
  }
  return run;
}

void save_ground_truth(const GroundTruth& gt,
                       const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (const auto& [query_id, annotation] : gt.entries()) {
    ordered_json object;
    object["query_id"] = query_id;
    object["start"] = annotation.segment.start();
    object["end"] = annotation.segment.end();
    if (annotation.duration) {
      object["duration"] = *annotation.duration;
    }
    out << object.dump() << '\n';
  }
  finish_output(out, path);
}

void save_run(const Run& run, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  for (const auto& [query_id, list] : run.lists) {
    ordered_json object;
    object["query_id"] = query_id;
    ordered_json moments = ordered_json::array();
    for (const Interval& moment : list.moments) {
      ordered_json entry;
      entry["start"] = moment.start();
      entry["end"] = moment.end();
      moments.push_back(std::move(entry));
    }
    object["moments"] = std::move(moments);
    out << object.dump() << '\n';
  }
  finish_output(out, path);
}

std::vector<RunCoverage> validate_bundle(const DatasetBundle& bundle,
                                         bool strict) {
  std::vector<RunCoverage> coverage;
  coverage.reserve(bundle.runs.size());
  for (const Run& run : bundle.runs) {
    RunCoverage c;
    c.system_id = run.system_id;
    c.total = bundle.gt.size();
    for (const auto& [query_id, list] : run.lists) {
      (void)list;
      if (!bundle.gt.contains(query_id)) {
        throw InvalidInput("run '" + run.system_id +
                           "' predicts unannotated query '" + query_id + "'");
      }
      ++c.covered;
    }
    if (strict && c.covered != c.total) {
      throw MissingPrediction("run '" + run.system_id + "' covers " +
                              std::to_string(c.covered) + " of " +
                              std::to_string(c.total) + " queries");
    }
    coverage.push_back(std::move(c));
  }
  return coverage;
}

void write_report(const EvalTable& table, const std::filesystem::path& path,
                  ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json root;
    root["measures"] = spec_names(table.specs);
    ordered_json systems = ordered_json::array();
    for (std::size_t r = 0; r < table.systems.size(); ++r) {
      ordered_json entry;
      entry["system"] = table.systems[r];
      ordered_json means;
      for (std::size_t s = 0; s < table.specs.size(); ++s) {
        means[table.specs[s].name()] = json_number(table.means[r][s]);
      }
      entry["means"] = std::move(means);
      if (!table.coverage.empty()) {
        entry["covered_queries"] = table.coverage[r].covered;
        entry["total_queries"] = table.coverage[r].total;
      }
      if (!table.per_query.empty()) {
        ordered_json per_query;
        for (std::size_t s = 0; s < table.specs.size(); ++s) {
          ordered_json scores;
          for (const auto& [query_id, value] : table.per_query[r][s]) {
            scores[query_id] = json_number(value);
          }
          per_query[table.specs[s].name()] = std::move(scores);
        }
        entry["per_query"] = std::move(per_query);
      }
      systems.push_back(std::move(entry));
    }
    root["systems"] = std::move(systems);
    dump_json(root, path);
    return;
  }

  std::ofstream out = open_output(path);
  out << "system";
  for (const MeasureSpec& spec : table.specs) {
    out << ',' << csv_cell(spec.name());
  }
  out << '\n';
  for (std::size_t r = 0; r < table.systems.size(); ++r) {
    out << csv_cell(table.systems[r]);
    for (std::size_t s = 0; s < table.specs.size(); ++s) {
      out << ',' << csv_number(table.means[r][s]);
    }
    out << '\n';
  }
  finish_output(out, path);
}

void write_report(const AgreementMatrix& matrix,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json root;
    root["measures"] = spec_names(matrix.specs);
    ordered_json rows = ordered_json::array();
    for (const std::vector<double>& row : matrix.values) {
      ordered_json cells = ordered_json::array();
      for (double v : row) {
        cells.push_back(json_number(v));
      }
      rows.push_back(std::move(cells));
    }
    root["tau"] = std::move(rows);
    dump_json(root, path);
    return;
  }

  std::ofstream out = open_output(path);
  out << "measure";
  for (const MeasureSpec& spec : matrix.specs) {
    out << ',' << csv_cell(spec.name());
  }
  out << '\n';
  for (std::size_t i = 0; i < matrix.specs.size(); ++i) {
    out << csv_cell(matrix.specs[i].name());
    for (double v : matrix.values[i]) {
      out << ',' << csv_number(v);
    }
    out << '\n';
  }
  finish_output(out, path);
}

void write_report(const std::vector<AxiomVerdict>& verdicts,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json cells = ordered_json::array();
    for (const AxiomVerdict& verdict : verdicts) {
      ordered_json cell;
      cell["measure"] = verdict.spec.name();
      cell["axiom"] = axiom_name(verdict.axiom);
      cell["trials"] = verdict.trials;
      cell["skipped"] = verdict.skipped;
      cell["violations"] = verdict.violations;
      cell["satisfied"] = verdict.satisfied();
      cell["expected_satisfied"] =
          axiom_expected_satisfied(verdict.spec.family(), verdict.axiom);
      if (verdict.witness) {
        const AxiomWitness& w = *verdict.witness;
        ordered_json witness;
        witness["query_index"] = w.perturbation.query_index;
        witness["rank"] = w.perturbation.rank;
        witness["original"] = w.perturbation.original;
        witness["replacement"] = w.perturbation.replacement;
        witness["kind"] = perturbation_name(w.perturbation.kind);
        witness["mean_before"] = w.mean_before;
        witness["mean_after"] = w.mean_after;
        ordered_json run = ordered_json::array();
        for (const std::vector<double>& scores : w.run) {
          run.push_back(scores);
        }
        witness["run"] = std::move(run);
        cell["witness"] = std::move(witness);
      }
      cells.push_back(std::move(cell));
    }
    ordered_json root;
    root["cells"] = std::move(cells);
    dump_json(root, path);
    return;
  }

  std::ofstream out = open_output(path);
  out << "measure,axiom,trials,skipped,violations,satisfied,expected_satisfied\n";
  for (const AxiomVerdict& verdict : verdicts) {
    out << csv_cell(verdict.spec.name()) << ',' << axiom_name(verdict.axiom)
        << ',' << verdict.trials << ',' << verdict.skipped << ','
        << verdict.violations << ',' << (verdict.satisfied() ? 1 : 0) << ','
        << (axiom_expected_satisfied(verdict.spec.family(), verdict.axiom)
                ? 1
                : 0)
        << '\n';
  }
  finish_output(out, path);
}

void write_report(const std::vector<StabilityReport>& reports,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json rows = ordered_json::array();
    for (const StabilityReport& report : reports) {
      ordered_json row;
      row["measure"] = report.spec.name();
      row["subset_size"] = report.subset_size;
      row["trials"] = report.trials;
      row["dropped"] = report.dropped;
      row["tau_mean"] = json_number(report.tau_mean);
      row["tau_variance"] = json_number(report.tau_variance);
      rows.push_back(std::move(row));
    }
    ordered_json root;
    root["rows"] = std::move(rows);
    dump_json(root, path);
    return;
  }

  std::ofstream out = open_output(path);
  out << "measure,subset_size,trials,dropped,tau_mean,tau_variance\n";
  for (const StabilityReport& report : reports) {
    out << csv_cell(report.spec.name()) << ',' << report.subset_size << ','
        << report.trials << ',' << report.dropped << ','
        << csv_number(report.tau_mean) << ','
        << csv_number(report.tau_variance) << '\n';
  }
  finish_output(out, path);
}

void write_report(const std::vector<NoiseReport>& reports,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json rows = ordered_json::array();
    for (const NoiseReport& report : reports) {
      ordered_json row;
      row["measure"] = report.spec.name();
      row["beta2"] = report.beta2;
      row["mean_rmse"] = report.mean_rmse;
      row["mean_median_iou"] = report.mean_median_iou;
      ordered_json rmse;
      for (const auto& [system_id, value] : report.rmse_per_system) {
        rmse[system_id] = value;
      }
      row["rmse"] = std::move(rmse);
      rows.push_back(std::move(row));
    }
    ordered_json root;
    root["rows"] = std::move(rows);
    dump_json(root, path);
    return;
  }

  // The system set is fixed across rows, so systems become columns.
  std::vector<std::string> systems;
  if (!reports.empty()) {
    for (const auto& [system_id, value] : reports.front().rmse_per_system) {
      (void)value;
      systems.push_back(system_id);
    }
  }
  std::ofstream out = open_output(path);
  out << "measure,beta2,mean_rmse,mean_median_iou";
  for (const std::string& system : systems) {
    out << ',' << csv_cell("rmse:" + system);
  }
  out << '\n';
  for (const NoiseReport& report : reports) {
    out << csv_cell(report.spec.name()) << ',' << format_number(report.beta2)
        << ',' << csv_number(report.mean_rmse) << ','
        << csv_number(report.mean_median_iou);
    for (const std::string& system : systems) {
      out << ',' << csv_number(report.rmse_per_system.at(system));
    }
    out << '\n';
  }
  finish_output(out, path);
}

void write_report(const SelectionReport& report,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json root;
    root["validation_measures"] = spec_names(report.validation_specs);
    root["test_measures"] = spec_names(report.test_specs);
    ordered_json chosen = ordered_json::array();
    for (std::size_t v = 0; v < report.chosen_models.size(); ++v) {
      ordered_json entry;
      entry["validation_measure"] = report.validation_specs[v].name();
      entry["model"] = report.chosen_models[v];
      ordered_json z;
      for (std::size_t t = 0; t < report.test_specs.size(); ++t) {
        z[report.test_specs[t].name()] = json_number(report.z_scores[v][t]);
      }
      entry["z"] = std::move(z);
      chosen.push_back(std::move(entry));
    }
    root["chosen"] = std::move(chosen);
    ordered_json degenerate = ordered_json::array();
    for (bool flag : report.degenerate) {
      degenerate.push_back(flag);
    }
    root["degenerate"] = std::move(degenerate);
    dump_json(root, path);
    return;
  }

  std::ofstream out = open_output(path);
  out << "validation_measure,chosen_model";
  for (const MeasureSpec& spec : report.test_specs) {
    out << ',' << csv_cell("z:" + spec.name());
  }
  out << '\n';
  for (std::size_t v = 0; v < report.chosen_models.size(); ++v) {
    out << csv_cell(report.validation_specs[v].name()) << ','
        << csv_cell(report.chosen_models[v]);
    for (std::size_t t = 0; t < report.test_specs.size(); ++t) {
      out << ',' << csv_number(report.z_scores[v][t]);
    }
    out << '\n';
  }
  finish_output(out, path);
}

void write_report(const std::vector<TheoryRow>& rows,
                  const std::filesystem::path& path, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    ordered_json out_rows = ordered_json::array();
    for (const TheoryRow& row : rows) {
      ordered_json entry;
      entry["measure"] = row.measure;
      entry["r"] = row.point.r;
      entry["theta"] = json_number(row.point.theta);
      entry["gamma"] = row.point.gamma;
      entry["bias"] = row.point.bias;
      entry["variance"] = row.point.variance;
      entry["mse"] = row.point.mse;
      out_rows.push_back(std::move(entry));
    }
    ordered_json root;
    root["rows"] = std::move(out_rows);
    dump_json(root, path);
    return;
  }

  std::ofstream out = open_output(path);
  out << "measure,r,theta,gamma,bias,variance,mse\n";
  for (const TheoryRow& row : rows) {
    out << csv_cell(row.measure) << ',' << format_number(row.point.r) << ','
        << csv_number(row.point.theta) << ',' << format_number(row.point.gamma)
        << ',' << format_number(row.point.bias) << ','
        << format_number(row.point.variance) << ','
        << format_number(row.point.mse) << '\n';
  }
  finish_output(out, path);
}

}  // namespace vmreval

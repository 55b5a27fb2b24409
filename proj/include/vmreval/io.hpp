#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vmreval/axioms.hpp"
#include "vmreval/dataset.hpp"
#include "vmreval/experiments.hpp"
#include "vmreval/measures.hpp"
#include "vmreval/rank_stats.hpp"
#include "vmreval/theory.hpp"

namespace vmreval {

// A ground truth plus the runs evaluated against it.
struct DatasetBundle {
  GroundTruth gt;
  std::vector<Run> runs;
  std::map<std::string, std::string> metadata;
};

// JSONL, one object per line:
//   {"query_id": "q1", "start": 0.0, "end": 2.5, "duration": 30.0}
// duration is optional. Malformed lines raise ParseError with the line
// number; end < start raises InvalidInterval naming the query; repeated ids
// raise DuplicateKey.
GroundTruth load_ground_truth(const std::filesystem::path& path);

// JSONL, one object per line:
//   {"query_id": "q1", "moments": [{"start": 0.0, "end": 2.0, "score": 0.9}]}
// Scores are optional but must be given for all moments of a line or none;
// when present the moments are reordered by descending score (stable, so file
// order breaks ties), otherwise file order is rank order. The system id is
// the file stem unless overridden.
Run load_run(const std::filesystem::path& path);
Run load_run(const std::filesystem::path& path, const std::string& system_id);

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& path);

// Writes moments in rank order without scores; loading the file back yields
// the same run.
void save_run(const Run& run, const std::filesystem::path& path);

struct RunCoverage {
  std::string system_id;
  std::size_t covered = 0;  // gt queries the run predicts
  std::size_t total = 0;    // gt queries
};

// Runs may never predict queries the ground truth does not annotate. In
// strict mode every run must also cover every annotated query; in lenient
// mode gaps are allowed and reported.
std::vector<RunCoverage> validate_bundle(const DatasetBundle& bundle,
                                         bool strict);

enum class ReportFormat { kJson, kCsv };

// Mean-measure table produced by the eval command.
struct EvalTable {
  std::vector<std::string> systems;
  std::vector<MeasureSpec> specs;
  std::vector<std::vector<double>> means;  // [system][spec]
  // Optional per-query scores, same shape, each sorted by query id.
  std::vector<std::vector<std::vector<std::pair<std::string, double>>>>
      per_query;
  std::vector<RunCoverage> coverage;  // filled in lenient evaluation
};

// All writers emit deterministic field order and line endings; numbers are
// written with full round-trip precision, NaN becomes null (JSON) or an empty
// cell (CSV).
void write_report(const EvalTable& table, const std::filesystem::path& path,
                  ReportFormat format);
void write_report(const AgreementMatrix& matrix,
                  const std::filesystem::path& path, ReportFormat format);
void write_report(const std::vector<AxiomVerdict>& verdicts,
                  const std::filesystem::path& path, ReportFormat format);
void write_report(const std::vector<StabilityReport>& reports,
                  const std::filesystem::path& path, ReportFormat format);
void write_report(const std::vector<NoiseReport>& reports,
                  const std::filesystem::path& path, ReportFormat format);
void write_report(const SelectionReport& report,
                  const std::filesystem::path& path, ReportFormat format);
void write_report(const std::vector<TheoryRow>& rows,
                  const std::filesystem::path& path, ReportFormat format);

}  // namespace vmreval

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lyrecon/evaluation.hpp"
#include "lyrecon/generation_backend.hpp"
#include "lyrecon/metadata_join.hpp"
#include "lyrecon/prompt_builder.hpp"

namespace lyrecon {

// Input problem tied to a file (and line, when known). Maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  InputError(std::string file, std::size_t line, const std::string& detail);
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Joined records file: one JSON object per line.
// ---------------------------------------------------------------------------

std::string record_to_json(const ReconstructionRecord& record);
ReconstructionRecord record_from_json(const std::string& line);
void write_records(const std::filesystem::path& path, const std::vector<ReconstructionRecord>& records);
std::vector<ReconstructionRecord> read_records(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Corpus file: one JSON object per line with
// track_id, prompt_digest, model, created_at, lyrics.
// ---------------------------------------------------------------------------

struct CorpusEntry {
  std::string track_id;
  std::string prompt_digest;
  std::string model;
  std::string created_at;
  std::string lyrics;

  bool operator==(const CorpusEntry&) const = default;
};

std::string corpus_line(const CorpusEntry& entry);
// Only track_id and lyrics are required, so reference corpora can omit the rest.
CorpusEntry parse_corpus_line(const std::string& line);
// Throws InputError naming the offending line.
std::vector<CorpusEntry> read_corpus(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run manifest: append-only JSON lines beside the output corpus.
// ---------------------------------------------------------------------------

enum class TrackStatus { Pending, Done, Failed };

struct TrackState {
  TrackStatus status = TrackStatus::Pending;
  std::string reason;  // failures only
};

struct RunManifest {
  std::string config_digest;
  std::map<std::string, std::string> input_digests;
  std::map<std::string, TrackState> tracks;  // latest state per track

  std::size_t count(TrackStatus status) const;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& corpus_path);
// Missing file yields nullopt. A torn final line is ignored.
std::optional<RunManifest> load_manifest(const std::filesystem::path& path);

std::string file_digest(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct JoinOptions {
  std::filesystem::path bow_path;
  std::filesystem::path mood_path;
  std::filesystem::path genre_path;
  std::filesystem::path meta_path;
  std::optional<std::filesystem::path> mood_table_path;  // default table when unset
  std::filesystem::path out_path;
  MoodColumns mood_columns;
  MetaColumns meta_columns;
};

// Writes the records file and `<out>.report.txt`. Throws InputError on parse errors.
JoinReport run_join(const JoinOptions& options);

enum class BackendKind { Mock, Live };

struct ReconstructOptions {
  std::filesystem::path records_path;
  std::filesystem::path out_path;
  std::filesystem::path cache_dir;
  BackendKind backend = BackendKind::Mock;
  BackendConfig config;
  PromptOptions prompt;
  // Stop after this many newly processed tracks; simulates an interrupted run.
  std::optional<std::size_t> limit;
};

struct ReconstructSummary {
  std::size_t total = 0;
  std::size_t already_done = 0;
  std::size_t done = 0;  // done at the end of this run, including earlier runs
  std::size_t failed = 0;
  std::size_t pending = 0;
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
};

// Digest of everything that changes generated text for a given record.
std::string reconstruct_config_digest(const ReconstructOptions& options);

ReconstructSummary run_reconstruct(const ReconstructOptions& options, Backend& backend,
                                   GeneratorHooks hooks = {});

struct EvaluateOptions {
  std::filesystem::path corpus_path;
  std::optional<std::filesystem::path> reference_path;
  std::filesystem::path abstract_lexicon_path;
  std::filesystem::path concrete_lexicon_path;
  std::optional<std::filesystem::path> bow_path;
  std::filesystem::path out_dir;
  std::string label = "Reconstructed";
  std::string reference_label = "Original";
};

struct EvaluateSummary {
  CorpusStats stats;
  std::optional<CorpusStats> reference_stats;
  std::optional<ComparisonReport> comparison;
  std::optional<double> mean_coverage;
  std::size_t fidelity_tracks = 0;
};

// Writes stats.{txt,tsv}; with a reference also reference_stats.{txt,tsv} and
// report.{txt,tsv}; with BoW input also fidelity.tsv.
EvaluateSummary run_evaluate(const EvaluateOptions& options);

struct ReportOptions {
  std::filesystem::path left_stats;
  std::filesystem::path right_stats;
  std::filesystem::path out_dir;
  std::string left_label = "Reconstructed";
  std::string right_label = "Original";
};

ComparisonReport run_report(const ReportOptions& options);

}  // namespace lyrecon

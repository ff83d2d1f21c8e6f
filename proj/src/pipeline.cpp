#include "lyrecon/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "strings.hpp"

namespace lyrecon {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open file");
  return in;
}

void write_file_atomically(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out.flush()) throw std::runtime_error("cannot write " + temp.string());
  }
  fs::rename(temp, path);
}

// Appends one line and flushes, so each state change reaches disk on its own.
class LineAppender {
 public:
  explicit LineAppender(const fs::path& path) : out_(path, std::ios::binary | std::ios::app) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for append");
  }
  void append(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw std::runtime_error("write failed");
  }

 private:
  std::ofstream out_;
};

std::string format_double(double value) { return json(value).dump(); }

}  // namespace

InputError::InputError(std::string file, std::size_t line, const std::string& detail)
    : std::runtime_error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + detail),
      file_(std::move(file)),
      line_(line) {}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

std::string record_to_json(const ReconstructionRecord& record) {
  json j;
  j["track_id"] = record.track_id;
  j["artist"] = record.artist;
  j["title"] = record.title;
  j["tags"] = record.tags;
  j["valence"] = record.mood.valence;
  j["arousal"] = record.mood.arousal;
  j["theta"] = record.theta;
  j["mood_label"] = record.mood_label;
  j["vocabulary"] = record.vocabulary;
  return j.dump();
}

ReconstructionRecord record_from_json(const std::string& line) {
  const json j = json::parse(line);
  ReconstructionRecord r;
  r.track_id = j.at("track_id").get<std::string>();
  r.artist = j.at("artist").get<std::string>();
  r.title = j.at("title").get<std::string>();
  r.tags = j.at("tags").get<std::vector<std::string>>();
  r.mood = {j.at("valence").get<double>(), j.at("arousal").get<double>()};
  r.theta = j.at("theta").get<double>();
  r.mood_label = j.at("mood_label").get<std::string>();
  r.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  if (r.track_id.empty()) throw std::invalid_argument("empty track_id");
  if (!(r.theta >= 0.0 && r.theta < kTwoPi)) throw std::invalid_argument("theta outside [0, 2pi)");
  return r;
}

void write_records(const fs::path& path, const std::vector<ReconstructionRecord>& records) {
  std::string content;
  for (const auto& r : records) content += record_to_json(r) + "\n";
  write_file_atomically(path, content);
}

std::vector<ReconstructionRecord> read_records(const fs::path& path) {
  auto in = open_input(path);
  std::vector<ReconstructionRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      records.push_back(record_from_json(line));
    } catch (const std::exception& e) {
      throw InputError(path.string(), line_no, std::string("bad record: ") + e.what());
    }
    if (!seen.insert(records.back().track_id).second) {
      throw InputError(path.string(), line_no, "duplicate track_id " + records.back().track_id);
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

std::string corpus_line(const CorpusEntry& entry) {
  json j;
  j["track_id"] = entry.track_id;
  j["prompt_digest"] = entry.prompt_digest;
  j["model"] = entry.model;
  j["created_at"] = entry.created_at;
  j["lyrics"] = entry.lyrics;
  return j.dump();
}

CorpusEntry parse_corpus_line(const std::string& line) {
  const json j = json::parse(line);
  CorpusEntry e;
  e.track_id = j.at("track_id").get<std::string>();
  e.lyrics = j.at("lyrics").get<std::string>();
  e.prompt_digest = j.value("prompt_digest", "");
  e.model = j.value("model", "");
  e.created_at = j.value("created_at", "");
  if (e.track_id.empty()) throw std::invalid_argument("empty track_id");
  return e;
}

std::vector<CorpusEntry> read_corpus(const fs::path& path) {
  auto in = open_input(path);
  std::vector<CorpusEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      entries.push_back(parse_corpus_line(line));
    } catch (const std::exception& e) {
      throw InputError(path.string(), line_no, std::string("malformed corpus line: ") + e.what());
    }
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

std::size_t RunManifest::count(TrackStatus status) const {
  return static_cast<std::size_t>(
      std::count_if(tracks.begin(), tracks.end(), [&](const auto& kv) { return kv.second.status == status; }));
}

fs::path manifest_path_for(const fs::path& corpus_path) {
  auto path = corpus_path;
  path += ".manifest";
  return path;
}

std::optional<RunManifest> load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  RunManifest manifest;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (detail::read_line(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      if (in.peek() == std::char_traits<char>::eof()) break;  // torn last write
      throw InputError(path.string(), line_no, "manifest line is not JSON");
    }
    if (j.contains("config_digest")) {
      manifest.config_digest = j.at("config_digest").get<std::string>();
      manifest.input_digests = j.value("inputs", std::map<std::string, std::string>{});
      have_header = true;
      continue;
    }
    if (!have_header) throw InputError(path.string(), line_no, "manifest lacks a header line");
    const auto id = j.at("track_id").get<std::string>();
    const auto status = j.at("status").get<std::string>();
    TrackState state;
    if (status == "done") {
      state.status = TrackStatus::Done;
    } else if (status == "failed") {
      state.status = TrackStatus::Failed;
      state.reason = j.value("reason", "");
    } else {
      state.status = TrackStatus::Pending;
    }
    manifest.tracks[id] = state;
  }
  if (!have_header) return std::nullopt;
  return manifest;
}

std::string file_digest(const fs::path& path) {
  auto in = open_input(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

// ---------------------------------------------------------------------------
// join
// ---------------------------------------------------------------------------

JoinReport run_join(const JoinOptions& options) {
  BowCorpus bow;
  {
    auto in = open_input(options.bow_path);
    try {
      bow = load_bow(in);
    } catch (const BowError& e) {
      throw InputError(options.bow_path.string(), e.line(), e.what());
    }
  }
  auto load_table = [](const fs::path& path, auto&& parse) {
    auto in = open_input(path);
    try {
      return parse(in);
    } catch (const MetadataError& e) {
      throw InputError(path.string(), e.line(), e.what());
    }
  };
  const auto mood = load_table(options.mood_path, [&](std::istream& in) {
    return parse_mood_table(in, options.mood_columns);
  });
  const auto genres = load_table(options.genre_path, [](std::istream& in) { return parse_genre_table(in); });
  const auto meta = load_table(options.meta_path, [&](std::istream& in) {
    return parse_track_meta(in, options.meta_columns);
  });

  std::optional<MoodTable> table;
  if (options.mood_table_path) {
    try {
      table = load_mood_table_file(options.mood_table_path->string());
    } catch (const MoodError& e) {
      throw InputError(options.mood_table_path->string(), 0, e.what());
    }
  } else {
    table = MoodTable::default_table();
  }

  auto result = join_records(bow, mood, genres, meta, *table);
  write_records(options.out_path, result.records);
  auto report_path = options.out_path;
  report_path += ".report.txt";
  write_file_atomically(report_path, format_join_report(result.report));
  return result.report;
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

std::string reconstruct_config_digest(const ReconstructOptions& options) {
  json j;
  j["backend"] = options.backend == BackendKind::Mock ? "mock" : "live";
  j["model"] = options.config.model;
  j["temperature"] = options.config.decoding.temperature;
  j["max_tokens"] = options.config.decoding.max_tokens;
  j["max_vocabulary_words"] =
      options.prompt.max_vocabulary_words ? json(*options.prompt.max_vocabulary_words) : json(nullptr);
  return sha256_hex(j.dump());
}

ReconstructSummary run_reconstruct(const ReconstructOptions& options, Backend& backend, GeneratorHooks hooks) {
  options.config.validate();
  const auto records = read_records(options.records_path);
  const auto config_digest = reconstruct_config_digest(options);
  const auto records_digest = file_digest(options.records_path);
  const auto manifest_path = manifest_path_for(options.out_path);

  std::vector<Prompt> prompts;
  prompts.reserve(records.size());
  for (const auto& record : records) {
    try {
      prompts.push_back(build_prompt(record, options.prompt));
    } catch (const PromptError& e) {
      throw InputError(options.records_path.string(), 0, record.track_id + ": " + e.what());
    }
  }

  // Recover state from an earlier run.
  std::set<std::string> done;
  std::map<std::string, CorpusEntry> kept;
  auto manifest = load_manifest(manifest_path);
  if (manifest) {
    if (manifest->config_digest != config_digest ||
        manifest->input_digests["records"] != records_digest) {
      throw InputError(manifest_path.string(), 0,
                       "existing manifest was written for different records or settings; "
                       "choose a new output path");
    }
    if (fs::exists(options.out_path)) {
      std::ifstream in(options.out_path, std::ios::binary);
      std::string line;
      while (detail::read_line(in, line)) {
        if (detail::trim(line).empty()) continue;
        try {
          auto entry = parse_corpus_line(line);
          auto it = manifest->tracks.find(entry.track_id);
          if (it != manifest->tracks.end() && it->second.status == TrackStatus::Done) {
            kept[entry.track_id] = std::move(entry);
          }
        } catch (const std::exception&) {
          // torn line from an interrupted write; regenerated below
        }
      }
    }
    for (const auto& [id, entry] : kept) done.insert(id);
  }

  std::unordered_map<std::string, std::size_t> order;
  for (std::size_t i = 0; i < records.size(); ++i) order[records[i].track_id] = i;

  auto write_canonical = [&] {
    std::vector<const CorpusEntry*> sorted;
    for (const auto& [id, entry] : kept) {
      if (order.count(id)) sorted.push_back(&entry);
    }
    std::sort(sorted.begin(), sorted.end(),
              [&](const auto* a, const auto* b) { return order[a->track_id] < order[b->track_id]; });
    std::string content;
    for (const auto* entry : sorted) content += corpus_line(*entry) + "\n";
    write_file_atomically(options.out_path, content);
  };

  // Start from a consistent pair: every corpus line is done in the manifest
  // and vice versa.
  write_canonical();
  {
    std::string header;
    json h;
    h["config_digest"] = config_digest;
    h["inputs"] = json{{"records", records_digest}};
    header = h.dump() + "\n";
    for (const auto& id : done) header += json{{"track_id", id}, {"status", "done"}}.dump() + "\n";
    if (manifest) {
      for (const auto& [id, state] : manifest->tracks) {
        if (state.status == TrackStatus::Failed && !done.count(id)) {
          header += json{{"track_id", id}, {"status", "failed"}, {"reason", state.reason}}.dump() + "\n";
        }
      }
    }
    write_file_atomically(manifest_path, header);
  }

  std::vector<Prompt> todo;
  for (const auto& prompt : prompts) {
    if (done.count(prompt.track_id)) continue;
    if (options.limit && todo.size() >= *options.limit) break;
    todo.push_back(prompt);
  }

  ReconstructSummary summary;
  summary.total = records.size();
  summary.already_done = done.size();

  ResultCache cache(options.cache_dir);
  Generator generator(backend, options.config, &cache, std::move(hooks));
  LineAppender corpus_out(options.out_path);
  LineAppender manifest_out(manifest_path);
  std::set<std::string> failed;

  generator.generate_batch(todo, [&](std::size_t index, BatchOutcome outcome) {
    const auto& id = todo[index].track_id;
    if (outcome.result) {
      const auto& r = *outcome.result;
      if (r.cached) ++summary.cache_hits;
      CorpusEntry entry{id, r.prompt_digest, r.model, r.created_at, r.lyrics};
      corpus_out.append(corpus_line(entry));
      manifest_out.append(json{{"track_id", id}, {"status", "done"}}.dump());
      kept[id] = std::move(entry);
      done.insert(id);
    } else {
      const std::string reason = outcome.error ? outcome.error->what() : "unknown error";
      manifest_out.append(json{{"track_id", id}, {"status", "failed"}, {"reason", reason}}.dump());
      failed.insert(id);
    }
  });

  write_canonical();
  summary.backend_calls = generator.backend_calls();
  summary.done = done.size();
  summary.failed = failed.size();
  summary.pending = summary.total - summary.done - summary.failed;
  return summary;
}

// ---------------------------------------------------------------------------
// evaluate / report
// ---------------------------------------------------------------------------

namespace {

Lexicon load_lexicon_input(const fs::path& path) {
  try {
    auto in = open_input(path);
    return load_lexicon(in, path.stem().string());
  } catch (const LexiconError& e) {
    throw InputError(path.string(), 0, e.what());
  }
}

std::vector<LyricDoc> corpus_docs(const std::vector<CorpusEntry>& entries) {
  std::vector<LyricDoc> docs;
  docs.reserve(entries.size());
  for (const auto& entry : entries) docs.push_back(segment(entry.lyrics));
  return docs;
}

CorpusStats stats_for(const fs::path& path, const std::vector<LyricDoc>& docs, const Lexicon& abstract_lex,
                      const Lexicon& concrete_lex) {
  try {
    return corpus_stats(docs, abstract_lex, concrete_lex);
  } catch (const EvaluationError& e) {
    throw InputError(path.string(), 0, e.what());
  }
}

}  // namespace

EvaluateSummary run_evaluate(const EvaluateOptions& options) {
  const auto abstract_lex = load_lexicon_input(options.abstract_lexicon_path);
  const auto concrete_lex = load_lexicon_input(options.concrete_lexicon_path);

  const auto entries = read_corpus(options.corpus_path);
  const auto docs = corpus_docs(entries);

  EvaluateSummary summary;
  summary.stats = stats_for(options.corpus_path, docs, abstract_lex, concrete_lex);
  fs::create_directories(options.out_dir);
  write_file_atomically(options.out_dir / "stats.tsv", render_stats_tsv(summary.stats));
  write_file_atomically(options.out_dir / "stats.txt", render_stats_text(summary.stats, options.label));

  if (options.reference_path) {
    const auto ref_entries = read_corpus(*options.reference_path);
    const auto ref_docs = corpus_docs(ref_entries);
    summary.reference_stats = stats_for(*options.reference_path, ref_docs, abstract_lex, concrete_lex);
    write_file_atomically(options.out_dir / "reference_stats.tsv", render_stats_tsv(*summary.reference_stats));
    write_file_atomically(options.out_dir / "reference_stats.txt",
                          render_stats_text(*summary.reference_stats, options.reference_label));
    summary.comparison = compare(summary.stats, *summary.reference_stats);
    write_file_atomically(options.out_dir / "report.txt",
                          render_report_text(*summary.comparison, options.label, options.reference_label));
    write_file_atomically(options.out_dir / "report.tsv", render_report_tsv(*summary.comparison));
  }

  if (options.bow_path) {
    BowCorpus bow;
    {
      auto in = open_input(*options.bow_path);
      try {
        bow = load_bow(in);
      } catch (const BowError& e) {
        throw InputError(options.bow_path->string(), e.line(), e.what());
      }
    }
    std::unordered_map<std::string, const TrackBow*> by_id;
    for (const auto& track : bow.tracks) by_id[track.track_id] = &track;

    std::string tsv = "track_id\tcoverage\tfrequency_fidelity\n";
    double coverage_sum = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      auto it = by_id.find(entries[i].track_id);
      if (it == by_id.end()) continue;
      const double coverage = bow_coverage(docs[i], *it->second, bow.vocab);
      std::string fidelity = "n/a";
      try {
        fidelity = format_double(frequency_fidelity(docs[i], *it->second, bow.vocab));
      } catch (const EvaluationError&) {
      }
      tsv += entries[i].track_id + "\t" + format_double(coverage) + "\t" + fidelity + "\n";
      coverage_sum += coverage;
      ++summary.fidelity_tracks;
    }
    write_file_atomically(options.out_dir / "fidelity.tsv", tsv);
    if (summary.fidelity_tracks > 0) {
      summary.mean_coverage = coverage_sum / static_cast<double>(summary.fidelity_tracks);
    }
  }
  return summary;
}

ComparisonReport run_report(const ReportOptions& options) {
  auto load = [](const fs::path& path) {
    auto in = open_input(path);
    try {
      return parse_stats_tsv(in);
    } catch (const EvaluationError& e) {
      throw InputError(path.string(), 0, e.what());
    }
  };
  const auto report = compare(load(options.left_stats), load(options.right_stats));
  fs::create_directories(options.out_dir);
  write_file_atomically(options.out_dir / "report.txt",
                        render_report_text(report, options.left_label, options.right_label));
  write_file_atomically(options.out_dir / "report.tsv", render_report_tsv(report));
  return report;
}

}  // namespace lyrecon

// lyrecon: join dataset metadata, reconstruct lyrics from prompts, and
// evaluate the resulting corpus.
//
// Exit codes: 0 ok, 1 usage/configuration error, 2 input parse error,
// 3 empty join, 4 some tracks failed after retries.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>

#include "lyrecon/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInput = 2;
constexpr int kExitEmptyJoin = 3;
constexpr int kExitTrackFailures = 4;

char parse_delimiter(const std::string& text) {
  if (text == "\\t" || text == "tab") return '\t';
  if (text.size() != 1) throw CLI::ValidationError("--delimiter", "expected a single character or 'tab'");
  return text.front();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyric reconstruction from Bag-of-Words datasets"};
  app.set_config("--config", "", "Read options from an INI/TOML file");
  app.require_subcommand(1);

  // join
  lyrecon::JoinOptions join;
  std::string mood_table_path;
  std::string mood_delim = ",";
  std::string meta_delim = ",";
  auto* join_cmd = app.add_subcommand("join", "Inner-join BoW, mood, genre and artist/title tables into records");
  join_cmd->add_option("--bow", join.bow_path, "Bag-of-Words file")->required()->check(CLI::ExistingFile);
  join_cmd->add_option("--mood", join.mood_path, "Valence/arousal table")->required()->check(CLI::ExistingFile);
  join_cmd->add_option("--genre", join.genre_path, "track_id<TAB>genre table")->required()->check(CLI::ExistingFile);
  join_cmd->add_option("--meta", join.meta_path, "Artist/title table")->required()->check(CLI::ExistingFile);
  join_cmd->add_option("--mood-table", mood_table_path, "Mood partition file (default: built-in octants)")
      ->check(CLI::ExistingFile);
  join_cmd->add_option("--out", join.out_path, "Records output (JSON lines)")->required();
  join_cmd->add_option("--mood-id-col", join.mood_columns.id)->capture_default_str();
  join_cmd->add_option("--valence-col", join.mood_columns.valence)->capture_default_str();
  join_cmd->add_option("--arousal-col", join.mood_columns.arousal)->capture_default_str();
  join_cmd->add_option("--mood-delimiter", mood_delim)->capture_default_str();
  join_cmd->add_option("--meta-id-col", join.meta_columns.id)->capture_default_str();
  join_cmd->add_option("--artist-col", join.meta_columns.artist)->capture_default_str();
  join_cmd->add_option("--title-col", join.meta_columns.title)->capture_default_str();
  join_cmd->add_option("--meta-delimiter", meta_delim)->capture_default_str();

  // reconstruct
  lyrecon::ReconstructOptions recon;
  std::string backend_name = "mock";
  std::string model;
  std::size_t max_vocab_words = 0;
  std::size_t limit = 0;
  auto* recon_cmd = app.add_subcommand("reconstruct", "Generate lyrics for every joined record");
  recon_cmd->add_option("--records", recon.records_path, "Records file from `join`")
      ->required()
      ->check(CLI::ExistingFile);
  recon_cmd->add_option("--out", recon.out_path, "Corpus output (JSON lines)")->required();
  recon_cmd->add_option("--cache-dir", recon.cache_dir, "Content-addressed result cache")->required();
  recon_cmd->add_option("--backend", backend_name, "mock or live")
      ->check(CLI::IsMember({"mock", "live"}))
      ->capture_default_str();
  recon_cmd->add_option("--endpoint", recon.config.endpoint)->capture_default_str();
  recon_cmd->add_option("--model", model, "Model name (default: gpt-4o, or 'mock' for the mock backend)");
  recon_cmd->add_option("--temperature", recon.config.decoding.temperature)->capture_default_str();
  recon_cmd->add_option("--max-tokens", recon.config.decoding.max_tokens)->capture_default_str();
  recon_cmd->add_option("--timeout", recon.config.timeout_seconds, "Request timeout, seconds")->capture_default_str();
  recon_cmd->add_option("--max-attempts", recon.config.max_attempts)->capture_default_str();
  recon_cmd->add_option("--backoff", recon.config.base_backoff_seconds, "Base retry backoff, seconds")
      ->capture_default_str();
  recon_cmd->add_option("--max-in-flight", recon.config.max_in_flight)->capture_default_str();
  recon_cmd->add_option("--max-vocab-words", max_vocab_words, "Cap on prompt vocabulary (0 = no cap)");
  recon_cmd->add_option("--limit", limit, "Process at most N pending tracks this run (0 = all)");

  // evaluate
  lyrecon::EvaluateOptions eval;
  std::string reference;
  std::string eval_bow;
  auto* eval_cmd = app.add_subcommand("evaluate", "Corpus statistics, comparison and BoW fidelity");
  eval_cmd->add_option("--corpus", eval.corpus_path)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--reference", reference, "Reference corpus to compare against")->check(CLI::ExistingFile);
  eval_cmd->add_option("--abstract-lexicon", eval.abstract_lexicon_path)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--concrete-lexicon", eval.concrete_lexicon_path)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--bow", eval_bow, "BoW file for per-track coverage and fidelity")->check(CLI::ExistingFile);
  eval_cmd->add_option("--out-dir", eval.out_dir)->required();
  eval_cmd->add_option("--label", eval.label)->capture_default_str();
  eval_cmd->add_option("--reference-label", eval.reference_label)->capture_default_str();

  // report
  lyrecon::ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Render a comparison table from two stats.tsv files");
  report_cmd->add_option("--left", report.left_stats)->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--right", report.right_stats)->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out-dir", report.out_dir)->required();
  report_cmd->add_option("--left-label", report.left_label)->capture_default_str();
  report_cmd->add_option("--right-label", report.right_label)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (join_cmd->parsed()) {
      join.mood_columns.delimiter = parse_delimiter(mood_delim);
      join.meta_columns.delimiter = parse_delimiter(meta_delim);
      if (!mood_table_path.empty()) join.mood_table_path = mood_table_path;
      const auto result = lyrecon::run_join(join);
      std::cout << lyrecon::format_join_report(result);
      return result.joined == 0 ? kExitEmptyJoin : kExitOk;
    }

    if (recon_cmd->parsed()) {
      recon.backend = backend_name == "live" ? lyrecon::BackendKind::Live : lyrecon::BackendKind::Mock;
      recon.config.model = !model.empty() ? model : (recon.backend == lyrecon::BackendKind::Mock ? "mock" : "gpt-4o");
      if (max_vocab_words > 0) recon.prompt.max_vocabulary_words = max_vocab_words;
      if (limit > 0) recon.limit = limit;
      recon.config.validate();

      std::unique_ptr<lyrecon::Backend> backend;
      lyrecon::GeneratorHooks hooks;
      if (recon.backend == lyrecon::BackendKind::Live) {
        backend = lyrecon::ChatCompletionBackend::from_environment();
      } else {
        backend = std::make_unique<lyrecon::MockBackend>();
        // Mock output carries a fixed timestamp so reruns are byte-identical.
        hooks.clock = [] { return std::string("1970-01-01T00:00:00Z"); };
      }
      const auto summary = lyrecon::run_reconstruct(recon, *backend, hooks);
      std::cout << "total: " << summary.total << "\n"
                << "done: " << summary.done << "\n"
                << "failed: " << summary.failed << "\n"
                << "pending: " << summary.pending << "\n"
                << "backend_calls: " << summary.backend_calls << "\n"
                << "cache_hits: " << summary.cache_hits << "\n";
      return summary.failed > 0 ? kExitTrackFailures : kExitOk;
    }

    if (eval_cmd->parsed()) {
      if (!reference.empty()) eval.reference_path = reference;
      if (!eval_bow.empty()) eval.bow_path = eval_bow;
      const auto summary = lyrecon::run_evaluate(eval);
      if (summary.comparison) {
        std::cout << lyrecon::render_report_text(*summary.comparison, eval.label, eval.reference_label);
      } else {
        std::cout << lyrecon::render_stats_text(summary.stats, eval.label);
      }
      if (summary.mean_coverage) {
        std::printf("mean_coverage: %.6f (%zu tracks)\n", *summary.mean_coverage, summary.fidelity_tracks);
      }
      return kExitOk;
    }

    if (report_cmd->parsed()) {
      const auto result = lyrecon::run_report(report);
      std::cout << lyrecon::render_report_text(result, report.left_label, report.right_label);
      return kExitOk;
    }
  } catch (const lyrecon::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const lyrecon::GenerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

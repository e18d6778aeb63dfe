#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hearaug/augment.hpp"
#include "hearaug/mixing.hpp"
#include "hearaug/rtf.hpp"

namespace hearaug {

// ---------------------------------------------------------------------
// Corpus index: what audio exists and where.

struct SpeechRecord {
  std::string talker_id;
  std::string utterance_id;
  std::string path;  // relative to the index file's directory
  std::size_t duration_samples = 0;
};

struct NoiseRecord {
  std::string noise_id;
  std::string path;
  std::size_t duration_samples = 0;
};

struct CorpusIndex {
  std::vector<SpeechRecord> speech;
  std::vector<NoiseRecord> noise;
  // Grid tag ("individual", "ah-coarse", "ah-fine") -> RTF set directory,
  // relative to base_dir. A method only needs its own entry present.
  std::map<std::string, std::string> rtf_sets;
  int sample_rate = kPipelineSampleRate;
  std::filesystem::path base_dir;
  std::filesystem::path index_file;  // where the index was loaded from

  static CorpusIndex load(const std::filesystem::path& index_file);
  void validate() const;
  std::vector<std::string> talkers() const;  // sorted unique
};

// Speech WAVs hold channels (s_om, s_im[, body_im]) in that order.
SpeechPair load_speech_pair(const CorpusIndex& index,
                            const SpeechRecord& record);

// ---------------------------------------------------------------------
// Talker splits.

struct SplitConfig {
  // Either counts (seeded shuffle decides who goes where) ...
  std::size_t train_count = 12;
  std::size_t val_count = 2;
  std::size_t test_count = 4;
  // ... or explicit talker lists; non-empty lists take precedence.
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
};

struct SplitAssignment {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;

  // Split name for a talker, or empty if unassigned.
  std::string split_of(const std::string& talker) const;
  void validate() const;  // pairwise disjoint
};

SplitAssignment build_split(const CorpusIndex& index,
                            const SplitConfig& config, uint64_t seed);

// ---------------------------------------------------------------------
// Manifest: every random choice materialized at plan time. Generation
// consumes the manifest and draws nothing new; the white-noise signal is
// a pure function of the recorded render_seed.

struct ChannelStatsJson {
  double mean = 0.0;
  double std = 1.0;
  bool eps_guarded = false;
};

struct DatasetRecordPlan {
  std::string record_id;
  std::string split;
  std::string speech_talker;
  std::string speech_utterance;
  std::string speech_path;
  std::size_t speech_offset = 0;
  std::string noise_id;
  std::string noise_path;
  std::size_t noise_offset = 0;
  std::size_t noise_window_samples = 0;
  std::string method;
  std::string mode;  // "single" | "diffuse"
  std::string rtf_talker;              // empty for no-im-noise
  std::vector<double> directions_deg;  // one entry or the whole grid
  double decorrelation_db = kNoDecorrelation;  // serialized as null if -inf
  uint64_t render_seed = 0;
  double snr_db_requested = 0.0;

  // Filled by generate().
  std::string status;  // "", "ok", "failed"
  std::string error;
  double noise_gain = 0.0;
  ChannelStatsJson om_stats;
  ChannelStatsJson im_stats;
  double snr_db_achieved = 0.0;
  std::map<std::string, std::string> checksums;  // y_om/y_im/target -> hex
  std::map<std::string, std::string> outputs;    // y_om/... -> rel path
};

struct DatasetManifest {
  int schema_version = 1;
  std::string tool_version;
  uint64_t master_seed = 0;
  AugmentationPolicy policy;
  SplitAssignment split;
  double snr_min_db = kSnrRangeMinDb;
  double snr_max_db = kSnrRangeMaxDb;
  double utterance_s = kUtteranceSeconds;
  int sample_rate = kPipelineSampleRate;
  std::string corpus_index;   // path string as given to plan()
  std::string rtf_set_path;   // relative to the corpus base dir; may be ""
  std::vector<DatasetRecordPlan> records;

  static DatasetManifest load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;
};

// Which RTF set a method reads from the corpus index ("" for none).
std::string rtf_set_key_for(AugmentMethod method);

DatasetManifest plan(const CorpusIndex& index,
                     const AugmentationPolicy& policy,
                     const SplitConfig& split_config, double snr_min_db,
                     double snr_max_db, std::size_t n_mixtures,
                     uint64_t seed);

struct GenerateReport {
  std::size_t n_ok = 0;
  std::size_t n_failed = 0;
  std::vector<std::string> failed_records;
  std::filesystem::path manifest_path;
};

// Renders every planned record into out_dir/{split}/{record_id}/ as
// float32 WAVs (y_om, y_im, target) and writes the completed manifest to
// out_dir/manifest.json. Unreadable inputs fail only their own record;
// output write errors abort the run. Output is independent of workers.
GenerateReport generate(DatasetManifest manifest,
                        const std::filesystem::path& out_dir,
                        std::size_t workers = 1);

// FNV-1a over the audio quantized to 24-bit resolution (through float32,
// matching the stored sample format), as a 16-digit hex string. Absorbs
// sub-quantization float differences across platforms.
std::string audio_checksum(std::span<const double> x);

}  // namespace hearaug

// Command-line front end for the two-microphone noise augmentation
// toolkit. One subcommand per pipeline stage:
//
//   sweep        exponential sine sweep + matched inverse filter
//   measure-rtf  build a relative-transfer-function set from recordings
//   augment      render a two-channel noise pair from a mono recording
//   mix          compose noisy OM/IM channels at a target SNR
//   gen-dataset  plan and render a full dataset from a corpus index
//   eval         score a generated dataset (STOI, SNR, loss, coherence)
//   coherence    magnitude-squared coherence between two channels
//   fixtures     write the synthetic test corpus
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 schema, 5 audio format,
// 6 invalid argument, 1 anything else.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hearaug/audio.hpp"
#include "hearaug/augment.hpp"
#include "hearaug/dataset.hpp"
#include "hearaug/errors.hpp"
#include "hearaug/eval.hpp"
#include "hearaug/fixtures.hpp"
#include "hearaug/mixing.hpp"
#include "hearaug/rtf.hpp"
#include "hearaug/rng.hpp"
#include "hearaug/stoi.hpp"
#include "hearaug/sweep.hpp"
#include "hearaug/version.hpp"
#include "hearaug/wav.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hearaug;

namespace {

// ---------------------------------------------------------------------
// Small shared helpers.

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed while writing " + path.string());
}

// Resolves a path from a JSON file relative to that file's directory.
fs::path resolve_relative(const fs::path& anchor_file, const std::string& rel) {
  fs::path p(rel);
  if (p.is_absolute()) return p;
  return anchor_file.parent_path() / p;
}

// dB values of -inf serialize as JSON null.
json db_or_null(double db) {
  if (std::isinf(db) && db < 0.0) return nullptr;
  return db;
}

json stats_json(const NormStats& s) {
  return json{{"mean", s.mean}, {"std", s.std}, {"eps_guarded", s.eps_guarded}};
}

json provenance_json(const NoiseProvenance& p) {
  json j;
  j["method"] = to_string(p.method);
  j["mode"] = to_string(p.mode);
  j["rtf_talker"] = p.rtf_talker;
  j["directions_deg"] = p.directions_deg;
  j["decorrelation_db"] = db_or_null(p.decorrelation_db);
  j["diffuse_delay_s"] = p.diffuse_delay_s;
  j["shift_samples"] = p.shift_samples;
  j["wrapped_shifts"] = p.wrapped_shifts;
  j["zero_im"] = p.zero_im;
  return j;
}

// The --policy flag accepts short spellings alongside the canonical
// method names.
AugmentMethod method_from_cli(const std::string& s) {
  if (s == "no-im") return AugmentMethod::NoImNoise;
  if (s == "ah") return AugmentMethod::ArtificialHead;
  if (s == "ah-fine") return AugmentMethod::ArtificialHeadFine;
  return augment_method_from_string(s);
}

const std::vector<std::string> kPolicyChoices = {
    "no-im",          "ah",
    "ah-fine",        "non-individual",
    "individual",     "no-im-noise",
    "artificial-head", "artificial-head-fine"};

const std::vector<std::string> kModeChoices = {"single", "diffuse", "random"};

AudioBuffer load_mono_wav(const fs::path& path, const std::string& role) {
  auto buffer = load_wav(path);
  if (buffer.num_channels() != 1)
    throw FormatError(role + " must be mono: " + path.string() + " has " +
                      std::to_string(buffer.num_channels()) + " channels");
  return buffer;
}

AudioBuffer extract_channel(const AudioBuffer& buffer, std::size_t c,
                            std::string label) {
  return make_mono(buffer.channel(c), buffer.sample_rate, std::move(label));
}

// ---------------------------------------------------------------------
// sweep

struct SweepArgs {
  SweepSpec spec;
  std::string out;
};

void run_sweep(const SweepArgs& args) {
  args.spec.validate();
  const auto signals = generate_sweep(args.spec);
  fs::create_directories(args.out);
  const fs::path dir(args.out);
  save_wav(signals.sweep, dir / "sweep.wav", WavDepth::Float64);
  save_wav(signals.inverse_filter, dir / "inverse.wav", WavDepth::Float64);
  std::cout << "wrote " << (dir / "sweep.wav").string() << " and "
            << (dir / "inverse.wav").string() << " ("
            << args.spec.num_samples() << " samples, "
            << args.spec.f_start << " Hz to " << args.spec.f_end << " Hz at "
            << args.spec.sample_rate << " Hz)\n";
}

// ---------------------------------------------------------------------
// measure-rtf

struct MeasureRtfArgs {
  std::string recordings;
  std::string out;
  std::string tag;              // empty: take from JSON, default individual
  std::size_t ir_length = 0;    // 0: take from JSON, default 512
  std::size_t path_taps = 4096; // deconvolved measurement IR length
  double eps_rel = 1e-4;
};

SweepSpec sweep_spec_from_json(const json& j) {
  SweepSpec spec;
  spec.f_start = j.value("f_start", spec.f_start);
  spec.f_end = j.value("f_end", spec.f_end);
  spec.duration = j.value("duration", spec.duration);
  spec.sample_rate = j.value("sample_rate", spec.sample_rate);
  spec.amplitude = j.value("amplitude", spec.amplitude);
  return spec;
}

void run_measure_rtf(const MeasureRtfArgs& args) {
  const fs::path index_path(args.recordings);
  const json index = read_json_file(index_path);

  SweepSpec spec;
  std::string tag_name = "individual";
  std::size_t ir_length = kDefaultRtfIrLength;
  try {
    if (index.contains("sweep")) spec = sweep_spec_from_json(index.at("sweep"));
    if (index.contains("grid_tag"))
      tag_name = index.at("grid_tag").get<std::string>();
    if (index.contains("ir_length"))
      ir_length = index.at("ir_length").get<std::size_t>();
    if (!index.contains("recordings") || !index.at("recordings").is_array() ||
        index.at("recordings").empty())
      throw SchemaError(index_path.string() +
                        ": 'recordings' must be a non-empty array");
  } catch (const json::exception& e) {
    throw SchemaError(index_path.string() + ": " + e.what());
  }
  if (!args.tag.empty()) tag_name = args.tag;
  if (args.ir_length != 0) ir_length = args.ir_length;
  spec.validate();

  RtfSet set(grid_tag_from_string(tag_name), spec.sample_rate, ir_length);
  for (const auto& entry : index.at("recordings")) {
    std::string talker, file;
    double direction = 0.0;
    try {
      talker = entry.at("talker_id").get<std::string>();
      direction = entry.at("direction_deg").get<double>();
      file = entry.at("file").get<std::string>();
    } catch (const json::exception& e) {
      throw SchemaError(index_path.string() + ": recording entry: " +
                        e.what());
    }
    const auto recording = load_wav(resolve_relative(index_path, file));
    if (recording.num_channels() != 2)
      throw FormatError("sweep recording must have exactly two channels "
                        "(outer, inner): " + file);
    const auto ir_outer = deconvolve_ir(
        extract_channel(recording, 0, "outer"), spec, args.path_taps);
    const auto ir_inner = deconvolve_ir(
        extract_channel(recording, 1, "inner"), spec, args.path_taps);
    set.add(compute_rtf(ir_outer, ir_inner, spec.sample_rate, direction,
                        talker, args.eps_rel, ir_length));
  }
  set.validate();
  store_rtf_set(set, args.out);
  std::cout << "wrote RTF set '" << tag_name << "' with " << set.size()
            << " entries (" << set.talkers().size() << " talkers, "
            << set.direction_grid().size() << " directions) to " << args.out
            << "\n";
}

// ---------------------------------------------------------------------
// augment

struct AugmentArgs {
  std::string in;
  std::string rtf_set;
  std::string out;
  std::string own_talker;
  std::string policy = "individual";
  std::string mode = "random";
  double p_single = 0.5;
  double p_off = 0.1;
  double decorr_min_db = -100.0;
  double decorr_max_db = -60.0;
  double diffuse_delay_s = 1.0;
  uint64_t seed = 0;
};

void run_augment(const AugmentArgs& args) {
  AugmentationPolicy policy;
  policy.method = method_from_cli(args.policy);
  policy.source_mode = source_mode_from_string(args.mode);
  policy.p_single = args.p_single;
  policy.decorrelation = {args.p_off, args.decorr_min_db, args.decorr_max_db};
  policy.diffuse_delay_s = args.diffuse_delay_s;
  policy.master_seed = args.seed;
  policy.validate();

  std::optional<RtfSet> set;
  const RtfSet* set_ptr = nullptr;
  if (policy.method != AugmentMethod::NoImNoise) {
    if (args.rtf_set.empty())
      throw CLI::ValidationError(
          "--rtf-set is required for every method except no-im");
    set = load_rtf_set(args.rtf_set);
    set_ptr = &*set;
  }

  auto reference = load_mono_wav(args.in, "noise reference");
  if (set_ptr)
    require_sample_rate(reference, set_ptr->sample_rate(), "noise reference");

  Rng rng(args.seed);
  const auto pair = augment(reference, policy, set_ptr, args.own_talker, rng);

  fs::create_directories(args.out);
  const fs::path dir(args.out);
  // Float64 keeps the OM channel a bit-exact copy of the loaded input.
  save_wav(pair.om, dir / "noise_om.wav", WavDepth::Float64);
  save_wav(pair.im, dir / "noise_im.wav", WavDepth::Float64);
  json prov = provenance_json(pair.provenance);
  prov["seed"] = args.seed;
  write_json_file(dir / "provenance.json", prov);

  std::cout << "rendered " << to_string(pair.provenance.method) << "/"
            << to_string(pair.provenance.mode);
  if (!pair.provenance.rtf_talker.empty())
    std::cout << " via talker " << pair.provenance.rtf_talker;
  if (pair.provenance.mode == SourceMode::SingleSource &&
      !pair.provenance.directions_deg.empty())
    std::cout << " at " << pair.provenance.directions_deg.front() << " deg";
  std::cout << " -> " << args.out << "\n";
}

// ---------------------------------------------------------------------
// mix

struct MixArgs {
  std::string speech;
  std::string noise_om;
  std::string noise_im;
  std::string out;
  std::string talker;
  double snr_db = 0.0;
  bool snr_given = false;
  double snr_min_db = kSnrRangeMinDb;
  double snr_max_db = kSnrRangeMaxDb;
  uint64_t seed = 0;
  bool cut = false;
  double utterance_s = kUtteranceSeconds;
};

void run_mix(const MixArgs& args) {
  auto speech_buf = load_wav(args.speech);
  if (speech_buf.num_channels() != 2 && speech_buf.num_channels() != 3)
    throw FormatError("speech input must have 2 or 3 channels "
                      "(outer, inner[, body]): " + args.speech);
  auto noise_om = load_mono_wav(args.noise_om, "noise OM channel");
  auto noise_im = load_mono_wav(args.noise_im, "noise IM channel");
  if (noise_om.num_samples() != noise_im.num_samples())
    throw InvalidArgument("noise OM/IM inputs have unequal lengths");
  if (noise_om.sample_rate != noise_im.sample_rate)
    throw InvalidArgument("noise OM/IM inputs have different sample rates");

  // Draw order: SNR, speech window, noise window.
  Rng rng(args.seed);
  const double snr = args.snr_given
                         ? args.snr_db
                         : rng.uniform(args.snr_min_db, args.snr_max_db);

  json window_info;
  if (args.cut) {
    const auto speech_cut = cut_utterance(speech_buf, args.utterance_s, rng);
    speech_buf = speech_cut.buffer;
    // The noise channels form a rendered pair, so they share one window.
    AudioBuffer noise_pair_buf(2, noise_om.num_samples(),
                               noise_om.sample_rate);
    noise_pair_buf.samples[0] = noise_om.channel(0);
    noise_pair_buf.samples[1] = noise_im.channel(0);
    const auto noise_cut = cut_utterance(noise_pair_buf, args.utterance_s,
                                         rng);
    noise_om = extract_channel(noise_cut.buffer, 0, "n_om");
    noise_im = extract_channel(noise_cut.buffer, 1, "n_im");
    window_info = json{{"speech_offset", speech_cut.offset},
                       {"speech_padded", speech_cut.padded_samples},
                       {"noise_offset", noise_cut.offset},
                       {"noise_padded", noise_cut.padded_samples}};
  }

  SpeechPair speech;
  speech.s_om = extract_channel(speech_buf, 0, "s_om");
  speech.s_im = extract_channel(speech_buf, 1, "s_im");
  if (speech_buf.num_channels() == 3)
    speech.body_im = extract_channel(speech_buf, 2, "body_im");
  speech.talker_id = args.talker;

  NoisePair noise;
  noise.om = std::move(noise_om);
  noise.im = std::move(noise_im);

  const auto result = mix(speech, noise, snr);

  fs::create_directories(args.out);
  const fs::path dir(args.out);
  save_wav(result.y_om, dir / "y_om.wav", WavDepth::Float32);
  save_wav(result.y_im, dir / "y_im.wav", WavDepth::Float32);
  save_wav(result.target, dir / "target.wav", WavDepth::Float32);

  json info;
  info["snr_db_requested"] = result.snr_db_requested;
  info["snr_db_achieved"] = result.snr_db_achieved;
  info["snr_out_of_range"] = result.snr_out_of_range;
  info["noise_gain"] = result.noise_gain;
  info["om_stats"] = stats_json(result.om_stats);
  info["im_stats"] = stats_json(result.im_stats);
  info["seed"] = args.seed;
  if (!window_info.is_null()) info["windows"] = window_info;
  write_json_file(dir / "mix.json", info);

  std::cout << "mixed at " << result.snr_db_requested
            << " dB SNR (achieved " << result.snr_db_achieved
            << " dB, noise gain " << result.noise_gain << ") -> "
            << args.out << "\n";
  if (result.snr_out_of_range)
    std::cerr << "warning: requested SNR lies outside the pipeline range ["
              << kSnrRangeMinDb << ", " << kSnrRangeMaxDb << "] dB\n";
}

// ---------------------------------------------------------------------
// gen-dataset

struct GenDatasetArgs {
  std::string config;
  std::string manifest;
  std::string corpus;
  std::string policy;
  std::string mode;
  std::string out;
  std::size_t n_mixtures = 0;
  bool n_given = false;
  double snr_min_db = kSnrRangeMinDb;
  bool snr_min_given = false;
  double snr_max_db = kSnrRangeMaxDb;
  bool snr_max_given = false;
  uint64_t seed = 0;
  bool seed_given = false;
  std::size_t workers = 1;
};

void print_generate_report(const GenerateReport& report) {
  std::cout << "generated " << report.n_ok << " records";
  if (report.n_failed > 0) std::cout << " (" << report.n_failed << " failed)";
  std::cout << " -> " << report.manifest_path.string() << "\n";
  if (report.n_failed > 0) {
    std::cerr << "warning: " << report.n_failed
              << " records failed; see their 'error' fields in the "
                 "manifest:";
    for (const auto& id : report.failed_records) std::cerr << " " << id;
    std::cerr << "\n";
  }
}

void run_gen_dataset(const GenDatasetArgs& args) {
  if (!args.manifest.empty()) {
    // Regeneration: every choice is already materialized in the manifest.
    auto manifest = DatasetManifest::load(args.manifest);
    print_generate_report(generate(std::move(manifest), args.out,
                                   args.workers));
    return;
  }

  json config = json::object();
  fs::path config_path;
  if (!args.config.empty()) {
    config_path = fs::path(args.config);
    config = read_json_file(config_path);
  }

  // Flags override the config file; the config fills in the rest.
  std::string corpus_file = args.corpus;
  if (corpus_file.empty() && config.contains("corpus_index"))
    corpus_file =
        resolve_relative(config_path,
                         config.at("corpus_index").get<std::string>())
            .string();
  if (corpus_file.empty())
    throw CLI::ValidationError(
        "a corpus index is required: pass --corpus or put 'corpus_index' "
        "in the config file");

  if (!args.seed_given)
    throw CLI::ValidationError("--seed is required when planning a dataset");

  std::size_t n_mixtures = args.n_given ? args.n_mixtures : 0;
  double snr_min = args.snr_min_db;
  double snr_max = args.snr_max_db;

  AugmentationPolicy policy;
  SplitConfig split_config;
  try {
    if (config.contains("policy")) {
      const auto& p = config.at("policy");
      if (p.contains("method"))
        policy.method = method_from_cli(p.at("method").get<std::string>());
      if (p.contains("source_mode"))
        policy.source_mode =
            source_mode_from_string(p.at("source_mode").get<std::string>());
      policy.p_single = p.value("p_single", policy.p_single);
      if (p.contains("decorrelation")) {
        const auto& d = p.at("decorrelation");
        policy.decorrelation.p_off =
            d.value("p_off", policy.decorrelation.p_off);
        policy.decorrelation.min_db =
            d.value("min_db", policy.decorrelation.min_db);
        policy.decorrelation.max_db =
            d.value("max_db", policy.decorrelation.max_db);
      }
      policy.diffuse_delay_s =
          p.value("diffuse_delay_s", policy.diffuse_delay_s);
    }
    if (config.contains("split")) {
      const auto& s = config.at("split");
      split_config.train_count =
          s.value("train_count", split_config.train_count);
      split_config.val_count = s.value("val_count", split_config.val_count);
      split_config.test_count =
          s.value("test_count", split_config.test_count);
      if (s.contains("train"))
        split_config.train = s.at("train").get<std::vector<std::string>>();
      if (s.contains("val"))
        split_config.val = s.at("val").get<std::vector<std::string>>();
      if (s.contains("test"))
        split_config.test = s.at("test").get<std::vector<std::string>>();
    }
    if (!args.snr_min_given) snr_min = config.value("snr_min_db", snr_min);
    if (!args.snr_max_given) snr_max = config.value("snr_max_db", snr_max);
    if (n_mixtures == 0) n_mixtures = config.value("n_mixtures", std::size_t{0});
  } catch (const json::exception& e) {
    throw SchemaError(args.config + ": " + e.what());
  }
  if (!args.policy.empty()) policy.method = method_from_cli(args.policy);
  if (!args.mode.empty())
    policy.source_mode = source_mode_from_string(args.mode);
  policy.master_seed = args.seed;
  if (n_mixtures == 0)
    throw CLI::ValidationError(
        "the number of mixtures is required: pass --n or put 'n_mixtures' "
        "in the config file");

  const auto index = CorpusIndex::load(corpus_file);
  auto manifest = plan(index, policy, split_config, snr_min, snr_max,
                       n_mixtures, args.seed);
  print_generate_report(generate(std::move(manifest), args.out,
                                 args.workers));
}

// ---------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string manifest;
  std::string metrics;
  std::string csv;
  std::vector<std::string> masks;
  double clip = kDefaultMaskClip;
  std::size_t limit = 0;
  bool skip_checksums = false;
};

struct MetricAccumulator {
  double sum = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    ++n;
  }
  json mean_or_null() const {
    if (n == 0) return nullptr;
    return sum / static_cast<double>(n);
  }
};

void run_eval(const EvalArgs& args) {
  const fs::path manifest_path(args.manifest);
  const auto manifest = DatasetManifest::load(manifest_path);
  const fs::path base = manifest_path.parent_path();

  std::vector<MaskVariant> variants;
  for (const auto& name : args.masks)
    variants.push_back(mask_variant_from_string(name));

  json records = json::array();
  std::size_t n_scored = 0, n_skipped = 0, n_errors = 0;
  MetricAccumulator stoi_noisy, snr_noisy, loss_noisy, coherence;
  std::map<std::string, MetricAccumulator> mask_stoi, mask_snr, mask_loss;

  for (const auto& rec : manifest.records) {
    if (args.limit != 0 && n_scored + n_errors >= args.limit) break;
    if (rec.status != "ok") {
      ++n_skipped;
      continue;
    }
    json row;
    row["record_id"] = rec.record_id;
    row["split"] = rec.split;
    row["method"] = rec.method;
    row["mode"] = rec.mode;
    row["snr_db_requested"] = rec.snr_db_requested;
    row["snr_db_achieved"] = rec.snr_db_achieved;
    try {
      AudioBuffer y_om = load_wav(base / rec.outputs.at("y_om"));
      AudioBuffer y_im = load_wav(base / rec.outputs.at("y_im"));
      AudioBuffer target = load_wav(base / rec.outputs.at("target"));
      if (!args.skip_checksums) {
        const std::map<std::string, const AudioBuffer*> loaded = {
            {"y_om", &y_om}, {"y_im", &y_im}, {"target", &target}};
        for (const auto& [name, buffer] : loaded) {
          const auto expected = rec.checksums.find(name);
          if (expected == rec.checksums.end()) continue;
          if (audio_checksum(mono_view(*buffer)) != expected->second)
            throw FormatError("checksum mismatch on " + name +
                              "; the file was modified after generation");
        }
      }

      row["stoi_noisy"] = stoi(target, y_om);
      row["snr_noisy_db"] = snr_db(target, y_om);
      row["loss_noisy"] = combined_l1_loss(y_om, target);
      row["mean_msc"] = mean_msc(y_om, y_im);
      stoi_noisy.add(row["stoi_noisy"].get<double>());
      snr_noisy.add(row["snr_noisy_db"].get<double>());
      loss_noisy.add(row["loss_noisy"].get<double>());
      coherence.add(row["mean_msc"].get<double>());

      for (const auto variant : variants) {
        const auto name = to_string(variant);
        const auto masks =
            oracle_masks(target, y_om, y_im, variant, args.clip);
        const auto s_hat = apply_masks(masks, y_om, y_im);
        json m;
        m["stoi"] = stoi(target, s_hat);
        m["snr_db"] = snr_db(target, s_hat);
        m["loss"] = combined_l1_loss(s_hat, target);
        mask_stoi[name].add(m["stoi"].get<double>());
        mask_snr[name].add(m["snr_db"].get<double>());
        mask_loss[name].add(m["loss"].get<double>());
        row["masks"][name] = std::move(m);
      }
      ++n_scored;
    } catch (const Error& e) {
      row["error"] = e.what();
      ++n_errors;
    }
    records.push_back(std::move(row));
  }

  json report;
  report["schema_version"] = 1;
  report["tool_version"] = kVersion;
  report["manifest"] = args.manifest;
  report["mask_clip"] = args.clip;
  report["n_scored"] = n_scored;
  report["n_skipped"] = n_skipped;
  report["n_errors"] = n_errors;
  json aggregates;
  aggregates["stoi_noisy_mean"] = stoi_noisy.mean_or_null();
  aggregates["snr_noisy_mean_db"] = snr_noisy.mean_or_null();
  aggregates["loss_noisy_mean"] = loss_noisy.mean_or_null();
  aggregates["mean_msc"] = coherence.mean_or_null();
  for (const auto& [name, acc] : mask_stoi) {
    aggregates["masks"][name]["stoi_mean"] = acc.mean_or_null();
    aggregates["masks"][name]["snr_mean_db"] =
        mask_snr.at(name).mean_or_null();
    aggregates["masks"][name]["loss_mean"] = mask_loss.at(name).mean_or_null();
  }
  report["aggregates"] = aggregates;
  report["records"] = std::move(records);

  const fs::path metrics_path = args.metrics.empty()
                                    ? base / "metrics.json"
                                    : fs::path(args.metrics);
  write_json_file(metrics_path, report);

  if (!args.csv.empty()) {
    std::ofstream csv(args.csv);
    if (!csv) throw IoError("cannot write " + args.csv);
    csv << "record_id,split,method,mode,snr_db_requested,snr_db_achieved,"
           "stoi_noisy,snr_noisy_db,loss_noisy,mean_msc";
    for (const auto variant : variants) {
      const auto name = to_string(variant);
      csv << ",stoi_" << name << ",snr_db_" << name << ",loss_" << name;
    }
    csv << "\n";
    for (const auto& row : report["records"]) {
      if (row.contains("error")) continue;
      csv << row["record_id"].get<std::string>() << ','
          << row["split"].get<std::string>() << ','
          << row["method"].get<std::string>() << ','
          << row["mode"].get<std::string>() << ','
          << row["snr_db_requested"].get<double>() << ','
          << row["snr_db_achieved"].get<double>() << ','
          << row["stoi_noisy"].get<double>() << ','
          << row["snr_noisy_db"].get<double>() << ','
          << row["loss_noisy"].get<double>() << ','
          << row["mean_msc"].get<double>();
      for (const auto variant : variants) {
        const auto& m = row["masks"][to_string(variant)];
        csv << ',' << m["stoi"].get<double>() << ','
            << m["snr_db"].get<double>() << ',' << m["loss"].get<double>();
      }
      csv << "\n";
    }
  }

  std::cout << "scored " << n_scored << " records (" << n_skipped
            << " skipped, " << n_errors << " errors) -> "
            << metrics_path.string() << "\n";
  if (stoi_noisy.n > 0) {
    std::cout << "  mean noisy STOI " << stoi_noisy.sum / stoi_noisy.n
              << ", mean noisy SNR " << snr_noisy.sum / snr_noisy.n
              << " dB, mean MSC " << coherence.sum / coherence.n << "\n";
    for (const auto& [name, acc] : mask_stoi)
      if (acc.n > 0)
        std::cout << "  oracle " << name << ": mean STOI " << acc.sum / acc.n
                  << ", mean SNR " << mask_snr.at(name).sum / acc.n
                  << " dB\n";
  }
}

// ---------------------------------------------------------------------
// coherence

struct CoherenceArgs {
  std::string in;
  std::string x;
  std::string y;
  std::string out;
  int segment_size = 256;
  int hop_size = 128;
};

void run_coherence(const CoherenceArgs& args) {
  AudioBuffer x, y;
  if (!args.in.empty()) {
    const auto buffer = load_wav(args.in);
    if (buffer.num_channels() < 2)
      throw FormatError("coherence needs two channels; " + args.in +
                        " has " + std::to_string(buffer.num_channels()));
    x = extract_channel(buffer, 0, "x");
    y = extract_channel(buffer, 1, "y");
  } else {
    x = load_mono_wav(args.x, "first channel");
    y = load_mono_wav(args.y, "second channel");
    if (x.sample_rate != y.sample_rate)
      throw InvalidArgument("inputs have different sample rates");
  }

  WelchConfig config{args.segment_size, args.hop_size};
  const auto bins = msc(x, y, config);
  double mean = 0.0;
  for (double v : bins) mean += v;
  mean /= static_cast<double>(bins.size());

  if (!args.out.empty()) {
    json j;
    j["sample_rate"] = x.sample_rate;
    j["segment_size"] = config.segment_size;
    j["hop_size"] = config.hop_size;
    j["mean_msc"] = mean;
    json rows = json::array();
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const double hz = static_cast<double>(k) * x.sample_rate /
                        config.segment_size;
      rows.push_back(json{{"freq_hz", hz}, {"msc", bins[k]}});
    }
    j["bins"] = std::move(rows);
    write_json_file(args.out, j);
  }
  std::cout << "mean MSC " << mean << " over " << bins.size() << " bins\n";
}

// ---------------------------------------------------------------------
// fixtures

struct FixturesArgs {
  std::string out;
  FixtureSpec spec;
};

void run_fixtures(const FixturesArgs& args) {
  const auto index = write_fixture_corpus(args.out, args.spec);
  std::cout << "wrote fixture corpus (" << args.spec.n_talkers
            << " talkers, " << args.spec.n_noise << " noise recordings) -> "
            << index.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-microphone hearable noise augmentation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("hearaug ") + kVersion);

  // --- sweep
  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Generate an exponential sine sweep and its inverse filter");
  sweep_cmd->add_option("--f-start", sweep_args.spec.f_start,
                        "Sweep start frequency in Hz");
  sweep_cmd->add_option("--f-end", sweep_args.spec.f_end,
                        "Sweep end frequency in Hz");
  sweep_cmd->add_option("--duration", sweep_args.spec.duration,
                        "Sweep duration in seconds");
  sweep_cmd->add_option("--rate", sweep_args.spec.sample_rate,
                        "Sample rate in Hz");
  sweep_cmd->add_option("--amplitude", sweep_args.spec.amplitude,
                        "Peak amplitude as a full-scale fraction");
  sweep_cmd->add_option("--out", sweep_args.out,
                        "Output directory for sweep.wav and inverse.wav")
      ->required();
  sweep_cmd->callback([&] { run_sweep(sweep_args); });

  // --- measure-rtf
  MeasureRtfArgs measure_args;
  auto* measure_cmd = app.add_subcommand(
      "measure-rtf",
      "Estimate relative transfer functions from sweep recordings");
  measure_cmd
      ->add_option("--recordings", measure_args.recordings,
                   "JSON index of two-channel sweep recordings")
      ->required();
  measure_cmd->add_option("--out", measure_args.out,
                          "Output directory for the RTF set")
      ->required();
  measure_cmd
      ->add_option("--tag", measure_args.tag,
                   "Grid tag stored with the set")
      ->check(CLI::IsMember({"individual", "ah-coarse", "ah-fine"}));
  measure_cmd->add_option("--ir-length", measure_args.ir_length,
                          "RTF impulse response taps (power of two)");
  measure_cmd->add_option("--path-taps", measure_args.path_taps,
                          "Deconvolved measurement IR taps");
  measure_cmd->add_option("--eps", measure_args.eps_rel,
                          "Relative Tikhonov regularization");
  measure_cmd->callback([&] { run_measure_rtf(measure_args); });

  // --- augment
  AugmentArgs augment_args;
  auto* augment_cmd = app.add_subcommand(
      "augment", "Render a two-channel noise pair from a mono recording");
  augment_cmd->add_option("--in", augment_args.in, "Mono noise WAV")
      ->required();
  augment_cmd->add_option("--rtf-set", augment_args.rtf_set,
                          "RTF set directory (all methods except no-im)");
  augment_cmd->add_option("--out", augment_args.out, "Output directory")
      ->required();
  augment_cmd
      ->add_option("--policy", augment_args.policy, "Augmentation method")
      ->check(CLI::IsMember(kPolicyChoices));
  augment_cmd->add_option("--own-talker", augment_args.own_talker,
                          "Talker the noise belongs to (individual methods)");
  augment_cmd->add_option("--mode", augment_args.mode, "Source mode")
      ->check(CLI::IsMember(kModeChoices));
  augment_cmd->add_option("--p-single", augment_args.p_single,
                          "P(single source) in random mode");
  augment_cmd->add_option("--p-off", augment_args.p_off,
                          "P(no decorrelation noise)");
  augment_cmd->add_option("--decorr-min", augment_args.decorr_min_db,
                          "Decorrelation level lower bound in dB");
  augment_cmd->add_option("--decorr-max", augment_args.decorr_max_db,
                          "Decorrelation level upper bound in dB");
  augment_cmd->add_option("--diffuse-delay", augment_args.diffuse_delay_s,
                          "Per-direction delay for the diffuse field in s");
  augment_cmd->add_option("--seed", augment_args.seed, "Random seed")
      ->required();
  augment_cmd->callback([&] { run_augment(augment_args); });

  // --- mix
  MixArgs mix_args;
  auto* mix_cmd = app.add_subcommand(
      "mix", "Compose noisy OM/IM channels at a target SNR");
  mix_cmd
      ->add_option("--speech", mix_args.speech,
                   "Speech WAV with channels (outer, inner[, body])")
      ->required();
  mix_cmd->add_option("--noise-om", mix_args.noise_om, "Noise OM WAV")
      ->required();
  mix_cmd->add_option("--noise-im", mix_args.noise_im, "Noise IM WAV")
      ->required();
  mix_cmd->add_option("--out", mix_args.out, "Output directory")->required();
  mix_cmd->add_option("--talker", mix_args.talker, "Talker id metadata");
  auto* snr_opt = mix_cmd->add_option("--snr", mix_args.snr_db,
                                      "Fixed SNR in dB (otherwise drawn)");
  mix_cmd->add_option("--snr-min", mix_args.snr_min_db,
                      "Lower SNR bound for the draw in dB");
  mix_cmd->add_option("--snr-max", mix_args.snr_max_db,
                      "Upper SNR bound for the draw in dB");
  mix_cmd->add_option("--seed", mix_args.seed, "Random seed")->required();
  mix_cmd->add_flag("--cut", mix_args.cut,
                    "Cut random utterance windows before mixing");
  mix_cmd->add_option("--utterance-s", mix_args.utterance_s,
                      "Window length for --cut in seconds");
  mix_cmd->callback([&] {
    mix_args.snr_given = snr_opt->count() > 0;
    run_mix(mix_args);
  });

  // --- gen-dataset
  GenDatasetArgs gen_args;
  auto* gen_cmd = app.add_subcommand(
      "gen-dataset", "Plan and render a dataset from a corpus index");
  auto* config_opt = gen_cmd->add_option("--config", gen_args.config,
                                         "Dataset configuration JSON");
  auto* manifest_opt =
      gen_cmd->add_option("--manifest", gen_args.manifest,
                          "Regenerate from an existing manifest");
  auto* corpus_opt = gen_cmd->add_option("--corpus", gen_args.corpus,
                                         "Corpus index JSON");
  auto* policy_opt =
      gen_cmd->add_option("--policy", gen_args.policy, "Augmentation method")
          ->check(CLI::IsMember(kPolicyChoices));
  auto* mode_opt = gen_cmd->add_option("--mode", gen_args.mode, "Source mode")
                       ->check(CLI::IsMember(kModeChoices));
  auto* n_opt = gen_cmd->add_option("--n", gen_args.n_mixtures,
                                    "Number of mixtures to plan");
  auto* snr_min_opt = gen_cmd->add_option("--snr-min", gen_args.snr_min_db,
                                          "Lower SNR bound in dB");
  auto* snr_max_opt = gen_cmd->add_option("--snr-max", gen_args.snr_max_db,
                                          "Upper SNR bound in dB");
  auto* seed_opt =
      gen_cmd->add_option("--seed", gen_args.seed, "Master random seed");
  gen_cmd->add_option("--workers", gen_args.workers,
                      "Worker threads for rendering")
      ->check(CLI::Range(std::size_t{1}, std::size_t{256}));
  gen_cmd->add_option("--out", gen_args.out, "Output dataset directory")
      ->required();
  manifest_opt->excludes(config_opt, corpus_opt, policy_opt, mode_opt, n_opt,
                         snr_min_opt, snr_max_opt, seed_opt);
  gen_cmd->callback([&] {
    gen_args.n_given = n_opt->count() > 0;
    gen_args.snr_min_given = snr_min_opt->count() > 0;
    gen_args.snr_max_given = snr_max_opt->count() > 0;
    gen_args.seed_given = seed_opt->count() > 0;
    run_gen_dataset(gen_args);
  });

  // --- eval
  EvalArgs eval_args;
  auto* eval_cmd =
      app.add_subcommand("eval", "Score a generated dataset");
  eval_cmd->add_option("--manifest", eval_args.manifest, "Dataset manifest")
      ->required();
  eval_cmd->add_option("--metrics", eval_args.metrics,
                       "Metrics report path (default: metrics.json next to "
                       "the manifest)");
  eval_cmd->add_option("--csv", eval_args.csv, "Optional per-record CSV");
  eval_cmd
      ->add_option("--masks", eval_args.masks,
                   "Oracle mask variants to score (comma separated)")
      ->delimiter(',')
      ->check(CLI::IsMember({"om", "im", "om-aux-im", "om-im"}));
  eval_cmd->add_option("--clip", eval_args.clip, "Mask magnitude clip");
  eval_cmd->add_option("--limit", eval_args.limit,
                       "Score only the first N records");
  eval_cmd->add_flag("--skip-checksums", eval_args.skip_checksums,
                     "Skip output checksum verification");
  eval_cmd->callback([&] { run_eval(eval_args); });

  // --- coherence
  CoherenceArgs coherence_args;
  auto* coherence_cmd = app.add_subcommand(
      "coherence", "Magnitude-squared coherence between two channels");
  auto* in_opt = coherence_cmd->add_option(
      "--in", coherence_args.in, "Two-channel WAV (channels 0 and 1)");
  auto* x_opt =
      coherence_cmd->add_option("--x", coherence_args.x, "First mono WAV");
  auto* y_opt =
      coherence_cmd->add_option("--y", coherence_args.y, "Second mono WAV");
  coherence_cmd->add_option("--segment", coherence_args.segment_size,
                            "Welch segment size");
  coherence_cmd->add_option("--hop", coherence_args.hop_size,
                            "Welch hop size");
  coherence_cmd->add_option("--out", coherence_args.out,
                            "Optional JSON output path");
  in_opt->excludes(x_opt, y_opt);
  x_opt->needs(y_opt);
  y_opt->needs(x_opt);
  coherence_cmd->callback([&] {
    if (coherence_args.in.empty() && coherence_args.x.empty())
      throw CLI::ValidationError("pass either --in or --x with --y");
    run_coherence(coherence_args);
  });

  // --- fixtures
  FixturesArgs fixtures_args;
  auto* fixtures_cmd = app.add_subcommand(
      "fixtures", "Write the synthetic test corpus");
  fixtures_cmd->add_option("--out", fixtures_args.out, "Corpus directory")
      ->required();
  fixtures_cmd
      ->add_option("--seed", fixtures_args.spec.seed, "Corpus random seed")
      ->required();
  fixtures_cmd->add_option("--talkers", fixtures_args.spec.n_talkers,
                           "Number of talkers");
  fixtures_cmd->add_option("--utterances",
                           fixtures_args.spec.n_utterances_per_talker,
                           "Utterances per talker");
  fixtures_cmd->add_option("--noises", fixtures_args.spec.n_noise,
                           "Number of noise recordings");
  fixtures_cmd->add_option("--directions", fixtures_args.spec.n_directions,
                           "Directions on the coarse grids");
  fixtures_cmd->add_option("--fine-directions",
                           fixtures_args.spec.n_fine_directions,
                           "Directions on the fine head grid");
  fixtures_cmd->add_option("--speech-s",
                           fixtures_args.spec.speech_duration_s,
                           "Speech duration in seconds");
  fixtures_cmd->add_option("--noise-s", fixtures_args.spec.noise_duration_s,
                           "Noise duration in seconds");
  fixtures_cmd->callback([&] { run_fixtures(fixtures_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const IoError& e) {
    std::cerr << "hearaug: I/O error: " << e.what() << "\n";
    return 3;
  } catch (const SchemaError& e) {
    std::cerr << "hearaug: schema error: " << e.what() << "\n";
    return 4;
  } catch (const FormatError& e) {
    std::cerr << "hearaug: format error: " << e.what() << "\n";
    return 5;
  } catch (const InvalidArgument& e) {
    std::cerr << "hearaug: invalid argument: " << e.what() << "\n";
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "hearaug: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

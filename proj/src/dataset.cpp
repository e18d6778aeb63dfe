#include "hearaug/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "hearaug/errors.hpp"
#include "hearaug/version.hpp"
#include "hearaug/wav.hpp"

namespace hearaug {

using nlohmann::json;

// ---------------------------------------------------------------------
// Corpus index.

void CorpusIndex::validate() const {
  if (sample_rate != kPipelineSampleRate)
    throw SchemaError("corpus index sample rate must be 16000");
  for (const auto& s : speech) {
    if (s.talker_id.empty() || s.utterance_id.empty() || s.path.empty())
      throw SchemaError("speech record with empty fields in corpus index");
    if (s.duration_samples == 0)
      throw SchemaError("speech record " + s.utterance_id +
                        " has zero duration");
  }
  for (const auto& n : noise) {
    if (n.noise_id.empty() || n.path.empty())
      throw SchemaError("noise record with empty fields in corpus index");
    if (n.duration_samples == 0)
      throw SchemaError("noise record " + n.noise_id + " has zero duration");
  }
}

std::vector<std::string> CorpusIndex::talkers() const {
  std::set<std::string> unique;
  for (const auto& s : speech) unique.insert(s.talker_id);
  return {unique.begin(), unique.end()};
}

CorpusIndex CorpusIndex::load(const std::filesystem::path& index_file) {
  std::ifstream in(index_file);
  if (!in) throw IoError("cannot open corpus index " + index_file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("corpus index " + index_file.string() +
                      " is not valid JSON: " + e.what());
  }

  CorpusIndex index;
  index.base_dir = index_file.parent_path();
  index.index_file = index_file;
  try {
    if (j.at("schema_version").get<int>() != 1)
      throw SchemaError("unsupported corpus index schema version");
    index.sample_rate = j.at("sample_rate").get<int>();
    for (const auto& s : j.at("speech")) {
      index.speech.push_back({s.at("talker_id").get<std::string>(),
                              s.at("utterance_id").get<std::string>(),
                              s.at("path").get<std::string>(),
                              s.at("duration_samples").get<std::size_t>()});
    }
    for (const auto& n : j.at("noise")) {
      index.noise.push_back({n.at("noise_id").get<std::string>(),
                             n.at("path").get<std::string>(),
                             n.at("duration_samples").get<std::size_t>()});
    }
    if (j.contains("rtf_sets"))
      for (const auto& [key, value] : j.at("rtf_sets").items())
        index.rtf_sets[key] = value.get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError("corpus index " + index_file.string() +
                      " is missing fields: " + e.what());
  }
  index.validate();
  return index;
}

SpeechPair load_speech_pair(const CorpusIndex& index,
                            const SpeechRecord& record) {
  AudioBuffer tracks = load_wav(index.base_dir / record.path);
  require_sample_rate(tracks, index.sample_rate, "speech " + record.path);
  if (tracks.num_channels() < 2)
    throw FormatError("speech file " + record.path +
                      " needs channels (s_om, s_im[, body_im]); found " +
                      std::to_string(tracks.num_channels()));
  SpeechPair pair;
  pair.talker_id = record.talker_id;
  pair.s_om = make_mono(tracks.channel(0), tracks.sample_rate, "s_om");
  pair.s_im = make_mono(tracks.channel(1), tracks.sample_rate, "s_im");
  if (tracks.num_channels() >= 3)
    pair.body_im =
        make_mono(tracks.channel(2), tracks.sample_rate, "body_im");
  return pair;
}

// ---------------------------------------------------------------------
// Splits.

std::string SplitAssignment::split_of(const std::string& talker) const {
  auto in = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), talker) != v.end();
  };
  if (in(train)) return "train";
  if (in(val)) return "val";
  if (in(test)) return "test";
  return "";
}

void SplitAssignment::validate() const {
  std::set<std::string> seen;
  for (const auto* part : {&train, &val, &test}) {
    for (const auto& t : *part) {
      if (!seen.insert(t).second)
        throw InvalidArgument("talker " + t +
                              " appears in more than one split");
    }
  }
}

SplitAssignment build_split(const CorpusIndex& index,
                            const SplitConfig& config, uint64_t seed) {
  SplitAssignment out;
  const std::vector<std::string> all = index.talkers();

  if (!config.train.empty() || !config.val.empty() ||
      !config.test.empty()) {
    out.train = config.train;
    out.val = config.val;
    out.test = config.test;
    out.validate();
    std::set<std::string> known(all.begin(), all.end());
    for (const auto* part : {&out.train, &out.val, &out.test})
      for (const auto& t : *part)
        if (!known.count(t))
          throw InvalidArgument("split lists unknown talker " + t);
    return out;
  }

  const std::size_t needed =
      config.train_count + config.val_count + config.test_count;
  if (all.size() < needed)
    throw InvalidArgument(
        "split needs " + std::to_string(needed) + " talkers but the corpus "
        "has only " + std::to_string(all.size()));

  // Seeded Fisher-Yates over the sorted talker list.
  std::vector<std::string> shuffled = all;
  Rng rng = Rng::substream(seed, 0, "talker-split");
  for (std::size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1], shuffled[rng.pick_index(i)]);

  auto it = shuffled.begin();
  out.train.assign(it, it + static_cast<std::ptrdiff_t>(config.train_count));
  it += static_cast<std::ptrdiff_t>(config.train_count);
  out.val.assign(it, it + static_cast<std::ptrdiff_t>(config.val_count));
  it += static_cast<std::ptrdiff_t>(config.val_count);
  out.test.assign(it, it + static_cast<std::ptrdiff_t>(config.test_count));
  out.validate();
  return out;
}

// ---------------------------------------------------------------------
// Manifest JSON.

namespace {

json stats_to_json(const ChannelStatsJson& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"eps_guarded", s.eps_guarded}};
}

ChannelStatsJson stats_from_json(const json& j) {
  return {j.at("mean").get<double>(), j.at("std").get<double>(),
          j.at("eps_guarded").get<bool>()};
}

json record_to_json(const DatasetRecordPlan& r) {
  json j{{"record_id", r.record_id},
         {"split", r.split},
         {"speech_talker", r.speech_talker},
         {"speech_utterance", r.speech_utterance},
         {"speech_path", r.speech_path},
         {"speech_offset", r.speech_offset},
         {"noise_id", r.noise_id},
         {"noise_path", r.noise_path},
         {"noise_offset", r.noise_offset},
         {"noise_window_samples", r.noise_window_samples},
         {"method", r.method},
         {"mode", r.mode},
         {"rtf_talker", r.rtf_talker},
         {"directions_deg", r.directions_deg},
         {"render_seed", r.render_seed},
         {"snr_db_requested", r.snr_db_requested}};
  if (r.decorrelation_db == kNoDecorrelation)
    j["decorrelation_db"] = nullptr;
  else
    j["decorrelation_db"] = r.decorrelation_db;
  if (!r.status.empty()) {
    j["status"] = r.status;
    if (r.status == "failed") {
      j["error"] = r.error;
    } else {
      j["noise_gain"] = r.noise_gain;
      j["om_stats"] = stats_to_json(r.om_stats);
      j["im_stats"] = stats_to_json(r.im_stats);
      j["snr_db_achieved"] = r.snr_db_achieved;
      j["checksums"] = r.checksums;
      j["outputs"] = r.outputs;
    }
  }
  return j;
}

DatasetRecordPlan record_from_json(const json& j) {
  DatasetRecordPlan r;
  r.record_id = j.at("record_id").get<std::string>();
  r.split = j.at("split").get<std::string>();
  r.speech_talker = j.at("speech_talker").get<std::string>();
  r.speech_utterance = j.at("speech_utterance").get<std::string>();
  r.speech_path = j.at("speech_path").get<std::string>();
  r.speech_offset = j.at("speech_offset").get<std::size_t>();
  r.noise_id = j.at("noise_id").get<std::string>();
  r.noise_path = j.at("noise_path").get<std::string>();
  r.noise_offset = j.at("noise_offset").get<std::size_t>();
  r.noise_window_samples = j.at("noise_window_samples").get<std::size_t>();
  r.method = j.at("method").get<std::string>();
  r.mode = j.at("mode").get<std::string>();
  r.rtf_talker = j.at("rtf_talker").get<std::string>();
  r.directions_deg = j.at("directions_deg").get<std::vector<double>>();
  const auto& level = j.at("decorrelation_db");
  r.decorrelation_db =
      level.is_null() ? kNoDecorrelation : level.get<double>();
  r.render_seed = j.at("render_seed").get<uint64_t>();
  r.snr_db_requested = j.at("snr_db_requested").get<double>();
  if (j.contains("status")) {
    r.status = j.at("status").get<std::string>();
    if (r.status == "failed") {
      r.error = j.value("error", "");
    } else {
      r.noise_gain = j.at("noise_gain").get<double>();
      r.om_stats = stats_from_json(j.at("om_stats"));
      r.im_stats = stats_from_json(j.at("im_stats"));
      r.snr_db_achieved = j.at("snr_db_achieved").get<double>();
      r.checksums =
          j.at("checksums").get<std::map<std::string, std::string>>();
      r.outputs =
          j.at("outputs").get<std::map<std::string, std::string>>();
    }
  }
  return r;
}

json policy_to_json(const AugmentationPolicy& p) {
  return {{"method", to_string(p.method)},
          {"source_mode", to_string(p.source_mode)},
          {"p_single", p.p_single},
          {"decorrelation",
           {{"p_off", p.decorrelation.p_off},
            {"min_db", p.decorrelation.min_db},
            {"max_db", p.decorrelation.max_db}}},
          {"diffuse_delay_s", p.diffuse_delay_s}};
}

AugmentationPolicy policy_from_json(const json& j) {
  AugmentationPolicy p;
  p.method = augment_method_from_string(j.at("method").get<std::string>());
  p.source_mode =
      source_mode_from_string(j.at("source_mode").get<std::string>());
  p.p_single = j.at("p_single").get<double>();
  const auto& d = j.at("decorrelation");
  p.decorrelation.p_off = d.at("p_off").get<double>();
  p.decorrelation.min_db = d.at("min_db").get<double>();
  p.decorrelation.max_db = d.at("max_db").get<double>();
  p.diffuse_delay_s = j.at("diffuse_delay_s").get<double>();
  return p;
}

}  // namespace

void DatasetManifest::save(const std::filesystem::path& file) const {
  json j{{"schema_version", schema_version},
         {"tool_version", tool_version},
         {"master_seed", master_seed},
         {"policy", policy_to_json(policy)},
         {"split",
          {{"train", split.train}, {"val", split.val},
           {"test", split.test}}},
         {"snr_range", {snr_min_db, snr_max_db}},
         {"utterance_s", utterance_s},
         {"sample_rate", sample_rate},
         {"corpus_index", corpus_index},
         {"rtf_set_path", rtf_set_path}};
  json records_json = json::array();
  for (const auto& r : records) records_json.push_back(record_to_json(r));
  j["records"] = std::move(records_json);

  std::ofstream out(file);
  if (!out) throw IoError("cannot write manifest " + file.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing manifest " + file.string());
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open manifest " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("manifest " + file.string() +
                      " is not valid JSON: " + e.what());
  }

  DatasetManifest m;
  try {
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != 1)
      throw SchemaError("unsupported manifest schema version " +
                        std::to_string(m.schema_version));
    m.tool_version = j.at("tool_version").get<std::string>();
    m.master_seed = j.at("master_seed").get<uint64_t>();
    m.policy = policy_from_json(j.at("policy"));
    const auto& split = j.at("split");
    m.split.train = split.at("train").get<std::vector<std::string>>();
    m.split.val = split.at("val").get<std::vector<std::string>>();
    m.split.test = split.at("test").get<std::vector<std::string>>();
    m.snr_min_db = j.at("snr_range").at(0).get<double>();
    m.snr_max_db = j.at("snr_range").at(1).get<double>();
    m.utterance_s = j.at("utterance_s").get<double>();
    m.sample_rate = j.at("sample_rate").get<int>();
    m.corpus_index = j.at("corpus_index").get<std::string>();
    m.rtf_set_path = j.at("rtf_set_path").get<std::string>();
    for (const auto& r : j.at("records"))
      m.records.push_back(record_from_json(r));
  } catch (const json::exception& e) {
    throw SchemaError("manifest " + file.string() +
                      " is missing fields: " + e.what());
  }
  return m;
}

// ---------------------------------------------------------------------
// Planning.

std::string rtf_set_key_for(AugmentMethod method) {
  switch (method) {
    case AugmentMethod::NoImNoise: return "";
    case AugmentMethod::ArtificialHead: return "ah-coarse";
    case AugmentMethod::ArtificialHeadFine: return "ah-fine";
    case AugmentMethod::NonIndividual:
    case AugmentMethod::Individual: return "individual";
  }
  throw InvalidArgument("unknown augmentation method enum value");
}

DatasetManifest plan(const CorpusIndex& index,
                     const AugmentationPolicy& policy,
                     const SplitConfig& split_config, double snr_min_db,
                     double snr_max_db, std::size_t n_mixtures,
                     uint64_t seed) {
  index.validate();
  policy.validate();
  if (n_mixtures == 0)
    throw InvalidArgument("n_mixtures must be positive");
  if (!(snr_min_db <= snr_max_db))
    throw InvalidArgument("SNR range is inverted");
  if (index.speech.empty() || index.noise.empty())
    throw InvalidArgument("corpus has no speech or no noise records");

  DatasetManifest manifest;
  manifest.tool_version = kVersion;
  manifest.master_seed = seed;
  manifest.policy = policy;
  manifest.snr_min_db = snr_min_db;
  manifest.snr_max_db = snr_max_db;
  manifest.sample_rate = index.sample_rate;
  manifest.split = build_split(index, split_config, seed);

  // Load the method's RTF set up front: talker and grid draws happen at
  // plan time so nothing random is left for generation.
  RtfSet set;
  const std::string set_key = rtf_set_key_for(policy.method);
  if (!set_key.empty()) {
    auto it = index.rtf_sets.find(set_key);
    if (it == index.rtf_sets.end())
      throw SchemaError("corpus index has no RTF set for '" + set_key +
                        "'");
    manifest.rtf_set_path = it->second;
    set = load_rtf_set(index.base_dir / it->second);
  }

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < index.speech.size(); ++i)
    if (!manifest.split.split_of(index.speech[i].talker_id).empty())
      eligible.push_back(i);
  if (eligible.empty())
    throw InvalidArgument("no speech records belong to any split");

  if (policy.method == AugmentMethod::Individual)
    for (std::size_t i : eligible)
      if (!set.has_talker(index.speech[i].talker_id))
        throw SchemaError("individual policy: RTF set lacks talker " +
                          index.speech[i].talker_id);

  const auto utt_samples = static_cast<std::size_t>(
      std::llround(manifest.utterance_s * index.sample_rate));
  const auto delay_samples = static_cast<std::size_t>(
      std::llround(policy.diffuse_delay_s * index.sample_rate));

  for (std::size_t i = 0; i < n_mixtures; ++i) {
    // Fixed per-record draw order: speech, noise, SNR, mode, talker,
    // direction, speech offset, noise offset, decorrelation level,
    // render seed. Every value lands in the manifest.
    Rng rng = Rng::substream(seed, i, "record");
    DatasetRecordPlan rec;
    char id[16];
    std::snprintf(id, sizeof(id), "r%06zu", i);
    rec.record_id = id;

    const SpeechRecord& sp =
        index.speech[eligible[rng.pick_index(eligible.size())]];
    rec.speech_talker = sp.talker_id;
    rec.speech_utterance = sp.utterance_id;
    rec.speech_path = sp.path;
    rec.split = manifest.split.split_of(sp.talker_id);

    const NoiseRecord& np = index.noise[rng.pick_index(index.noise.size())];
    rec.noise_id = np.noise_id;
    rec.noise_path = np.path;

    rec.snr_db_requested = rng.uniform(snr_min_db, snr_max_db);
    rec.method = to_string(policy.method);

    SourceMode mode = policy.source_mode;
    if (policy.method == AugmentMethod::NoImNoise)
      mode = SourceMode::SingleSource;
    else if (mode == SourceMode::RandomEachRecord)
      mode = sample_source_mode(policy, rng);
    rec.mode = to_string(mode);

    if (policy.method != AugmentMethod::NoImNoise) {
      rec.rtf_talker =
          choose_rtf_talker(policy.method, set, sp.talker_id, rng);
      if (mode == SourceMode::SingleSource)
        rec.directions_deg = {select_direction(set, rng)};
      else
        rec.directions_deg = set.direction_grid();
    }

    if (sp.duration_samples > utt_samples)
      rec.speech_offset =
          rng.pick_index(sp.duration_samples - utt_samples + 1);

    // Diffuse windows are long enough that the cumulative circular
    // shifts pull in fresh samples instead of wrapping onto the
    // utterance window.
    rec.noise_window_samples =
        mode == SourceMode::PseudoDiffuse
            ? utt_samples + (rec.directions_deg.size() - 1) * delay_samples
            : utt_samples;
    if (np.duration_samples > rec.noise_window_samples)
      rec.noise_offset = rng.pick_index(np.duration_samples -
                                        rec.noise_window_samples + 1);

    if (policy.method != AugmentMethod::NoImNoise)
      rec.decorrelation_db = policy.decorrelation.sample(rng);

    rec.render_seed = rng.next_u64();
    manifest.records.push_back(std::move(rec));
  }
  manifest.corpus_index = index.index_file.string();
  return manifest;
}

// ---------------------------------------------------------------------
// Generation.

std::string audio_checksum(std::span<const double> x) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (double v : x) {
    const auto f = static_cast<float>(v);
    long long q = std::llround(static_cast<double>(f) * 8388608.0);
    q = std::clamp<long long>(q, INT32_MIN, INT32_MAX);
    auto u = static_cast<uint32_t>(static_cast<int32_t>(q));
    for (int b = 0; b < 4; ++b) {
      h ^= (u >> (8 * b)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct GenerateContext {
  const DatasetManifest* manifest;
  const RtfSet* set;  // null when the method needs none
  std::filesystem::path corpus_base;
  std::filesystem::path out_dir;
  std::size_t utt_samples;
};

void process_record(const GenerateContext& ctx, DatasetRecordPlan& rec) {
  const DatasetManifest& m = *ctx.manifest;
  const AugmentMethod method = augment_method_from_string(rec.method);
  const SourceMode mode = source_mode_from_string(rec.mode);

  SpeechPair speech;
  AudioBuffer noise_window;
  NoisePair noise;
  MixResult result;
  try {
    SpeechRecord sp{rec.speech_talker, rec.speech_utterance,
                    rec.speech_path, 0};
    CorpusIndex shim;
    shim.base_dir = ctx.corpus_base;
    shim.sample_rate = m.sample_rate;
    SpeechPair full = load_speech_pair(shim, sp);
    AudioBuffer tracks(full.body_im ? 3 : 2, full.num_samples(),
                       m.sample_rate);
    tracks.channel(0) = full.s_om.channel(0);
    tracks.channel(1) = full.s_im.channel(0);
    if (full.body_im) tracks.channel(2) = full.body_im->channel(0);
    AudioBuffer cut = cut_at(tracks, rec.speech_offset, ctx.utt_samples);
    speech.talker_id = rec.speech_talker;
    speech.s_om = make_mono(cut.channel(0), m.sample_rate, "s_om");
    speech.s_im = make_mono(cut.channel(1), m.sample_rate, "s_im");
    if (cut.num_channels() >= 3)
      speech.body_im = make_mono(cut.channel(2), m.sample_rate, "body_im");

    AudioBuffer noise_full = load_wav(ctx.corpus_base / rec.noise_path);
    require_sample_rate(noise_full, m.sample_rate,
                        "noise " + rec.noise_path);
    if (noise_full.num_channels() != 1)
      throw FormatError("noise file " + rec.noise_path + " must be mono");
    noise_window =
        cut_at(noise_full, rec.noise_offset, rec.noise_window_samples);

    Rng white(rec.render_seed);
    if (method == AugmentMethod::NoImNoise) {
      noise = render_single_source(noise_window, nullptr, method, "", 0.0,
                                   kNoDecorrelation, white);
    } else if (mode == SourceMode::SingleSource) {
      noise = render_single_source(noise_window, ctx.set, method,
                                   rec.rtf_talker, rec.directions_deg.at(0),
                                   rec.decorrelation_db, white);
    } else {
      noise = render_diffuse(noise_window, ctx.set, method, rec.rtf_talker,
                             kNoDecorrelation, m.policy.diffuse_delay_s,
                             white);
      noise.om = cut_at(noise.om, 0, ctx.utt_samples);
      AudioBuffer im = cut_at(noise.im, 0, ctx.utt_samples);
      // Decorrelation noise goes onto the emitted window so the recorded
      // energy ratio holds on what is actually written.
      noise.im = add_decorrelation_noise(im, rec.decorrelation_db, white);
      noise.provenance.decorrelation_db = rec.decorrelation_db;
    }

    result = mix(speech, noise, rec.snr_db_requested);
  } catch (const Error& e) {
    rec.status = "failed";
    rec.error = e.what();
    return;
  }

  // Output phase: write failures abort the whole run, so they propagate.
  const std::filesystem::path rec_dir =
      ctx.out_dir / rec.split / rec.record_id;
  std::filesystem::create_directories(rec_dir);
  const std::string rel_base = rec.split + "/" + rec.record_id + "/";
  const std::pair<const char*, const AudioBuffer*> tracks[] = {
      {"y_om", &result.y_om},
      {"y_im", &result.y_im},
      {"target", &result.target}};
  for (const auto& [name, buffer] : tracks) {
    const std::string rel = rel_base + name + ".wav";
    save_wav(*buffer, ctx.out_dir / rel, WavDepth::Float32);
    rec.outputs[name] = rel;
    rec.checksums[name] = audio_checksum(mono_view(*buffer));
  }

  rec.status = "ok";
  rec.noise_gain = result.noise_gain;
  rec.om_stats = {result.om_stats.mean, result.om_stats.std,
                  result.om_stats.eps_guarded};
  rec.im_stats = {result.im_stats.mean, result.im_stats.std,
                  result.im_stats.eps_guarded};
  rec.snr_db_achieved = result.snr_db_achieved;
}

}  // namespace

GenerateReport generate(DatasetManifest manifest,
                        const std::filesystem::path& out_dir,
                        std::size_t workers) {
  if (workers == 0) throw InvalidArgument("workers must be at least 1");

  GenerateContext ctx;
  ctx.manifest = &manifest;
  ctx.out_dir = out_dir;
  ctx.corpus_base =
      std::filesystem::path(manifest.corpus_index).parent_path();
  ctx.utt_samples = static_cast<std::size_t>(
      std::llround(manifest.utterance_s * manifest.sample_rate));

  RtfSet set;
  if (!manifest.rtf_set_path.empty()) {
    set = load_rtf_set(ctx.corpus_base / manifest.rtf_set_path);
    ctx.set = &set;
  } else {
    ctx.set = nullptr;
  }

  std::filesystem::create_directories(out_dir);
  for (const char* split : {"train", "val", "test"})
    std::filesystem::create_directories(out_dir / split);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex fatal_mutex;
  std::exception_ptr fatal;

  auto worker = [&]() {
    while (!abort.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= manifest.records.size()) break;
      try {
        process_record(ctx, manifest.records[i]);
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        abort.store(true);
        break;
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, manifest.records.size());
         ++w)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  GenerateReport report;
  for (const auto& rec : manifest.records) {
    if (rec.status == "ok") {
      ++report.n_ok;
    } else {
      ++report.n_failed;
      report.failed_records.push_back(rec.record_id);
    }
  }
  report.manifest_path = out_dir / "manifest.json";
  manifest.save(report.manifest_path);
  return report;
}

}  // namespace hearaug

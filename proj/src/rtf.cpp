#include "hearaug/rtf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hearaug/errors.hpp"
#include "hearaug/fft.hpp"
#include "hearaug/wav.hpp"

namespace hearaug {

using nlohmann::json;

Rtf Rtf::from_impulse_response(std::vector<double> ir, double direction_deg,
                               std::string talker_id, int sample_rate,
                               std::size_t ir_length) {
  if (!fft::is_pow2(ir_length))
    throw InvalidArgument("Rtf: ir_length must be a power of two");
  if (sample_rate <= 0)
    throw InvalidArgument("Rtf: sample rate must be positive");
  ir.resize(ir_length, 0.0);
  Rtf rtf;
  rtf.freq_response = fft::rfft(ir, ir_length);
  rtf.impulse_response = std::move(ir);
  rtf.direction_deg = direction_deg;
  rtf.talker_id = std::move(talker_id);
  rtf.sample_rate = sample_rate;
  return rtf;
}

std::string to_string(GridTag tag) {
  switch (tag) {
    case GridTag::AhCoarse:
      return "ah-coarse";
    case GridTag::AhFine:
      return "ah-fine";
    case GridTag::Individual:
      return "individual";
  }
  throw InvalidArgument("unknown grid tag");
}

GridTag grid_tag_from_string(const std::string& s) {
  if (s == "ah-coarse") return GridTag::AhCoarse;
  if (s == "ah-fine") return GridTag::AhFine;
  if (s == "individual") return GridTag::Individual;
  throw SchemaError("unknown grid tag '" + s + "'");
}

RtfSet::RtfSet(GridTag tag, int sample_rate, std::size_t ir_length)
    : tag_(tag), sample_rate_(sample_rate), ir_length_(ir_length) {}

void RtfSet::add(Rtf rtf) {
  if (rtf.sample_rate != sample_rate_)
    throw SchemaError("RtfSet: entry sample rate " +
                      std::to_string(rtf.sample_rate) +
                      " does not match set rate " +
                      std::to_string(sample_rate_));
  if (rtf.impulse_response.size() != ir_length_)
    throw SchemaError("RtfSet: entry IR length does not match set");
  const std::pair<std::string, double> key{rtf.talker_id, rtf.direction_deg};
  if (entries_.count(key))
    throw SchemaError("RtfSet: duplicate entry for talker '" +
                      rtf.talker_id + "' at " +
                      std::to_string(rtf.direction_deg) + " deg");
  if (!std::binary_search(grid_.begin(), grid_.end(), rtf.direction_deg)) {
    grid_.insert(
        std::upper_bound(grid_.begin(), grid_.end(), rtf.direction_deg),
        rtf.direction_deg);
  }
  entries_.emplace(key, std::move(rtf));
}

const Rtf& RtfSet::entry(const std::string& talker,
                         double direction_deg) const {
  auto it = entries_.find({talker, direction_deg});
  if (it == entries_.end())
    throw InvalidArgument("RtfSet: no entry for talker '" + talker +
                          "' at " + std::to_string(direction_deg) + " deg");
  return it->second;
}

bool RtfSet::contains(const std::string& talker, double direction_deg) const {
  return entries_.count({talker, direction_deg}) > 0;
}

bool RtfSet::has_talker(const std::string& talker) const {
  auto it = entries_.lower_bound({talker, -1e300});
  return it != entries_.end() && it->first.first == talker;
}

std::vector<std::string> RtfSet::talkers() const {
  std::vector<std::string> out;
  for (const auto& [key, rtf] : entries_) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

void RtfSet::validate() const {
  if (entries_.empty()) throw SchemaError("RtfSet: empty set");
  for (const auto& talker : talkers()) {
    for (double deg : grid_) {
      if (!contains(talker, deg))
        throw SchemaError("RtfSet: talker '" + talker +
                          "' is missing direction " + std::to_string(deg));
    }
  }
}

Rtf compute_rtf(std::span<const double> ir_outer,
                std::span<const double> ir_inner, int sample_rate,
                double direction_deg, std::string talker_id, double eps_rel,
                std::size_t ir_length) {
  if (!fft::is_pow2(ir_length))
    throw InvalidArgument("compute_rtf: ir_length must be a power of two");
  const double e_outer = signal_energy(ir_outer);
  const double e_inner = signal_energy(ir_inner);
  if (e_outer == 0.0 && e_inner == 0.0)
    throw InvalidArgument("compute_rtf: both impulse responses are zero");

  // Oversampled ratio grid: at least 4x the stored IR length so the
  // truncation window sees a decayed tail.
  const std::size_t n = std::max(
      fft::next_pow2(std::max(ir_outer.size(), ir_inner.size())) * 2,
      ir_length * 4);
  const auto spec_outer = fft::rfft(ir_outer, n);
  const auto spec_inner = fft::rfft(ir_inner, n);

  double max_sq = 0.0;
  for (const auto& v : spec_outer) max_sq = std::max(max_sq, std::norm(v));
  const double eps = eps_rel * max_sq;

  std::vector<std::complex<double>> ratio(spec_outer.size());
  for (std::size_t k = 0; k < ratio.size(); ++k) {
    ratio[k] = spec_inner[k] * std::conj(spec_outer[k]) /
               (std::norm(spec_outer[k]) + eps);
  }

  auto long_ir = fft::irfft(ratio, n);
  long_ir.resize(ir_length);
  // Tukey-style tail fade on truncation, matching deconvolve_ir.
  const std::size_t fade = ir_length / 8;
  for (std::size_t i = 0; i < fade; ++i) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi *
                                          static_cast<double>(i + 1) /
                                          static_cast<double>(fade + 1));
    long_ir[ir_length - 1 - i] *= g;
  }
  return Rtf::from_impulse_response(std::move(long_ir), direction_deg,
                                    std::move(talker_id), sample_rate,
                                    ir_length);
}

AudioBuffer apply_rtf(const AudioBuffer& reference, const Rtf& rtf) {
  reference.validate();
  if (reference.sample_rate != rtf.sample_rate)
    throw InvalidArgument("apply_rtf: sample rate mismatch (" +
                          std::to_string(reference.sample_rate) + " vs " +
                          std::to_string(rtf.sample_rate) + ")");
  AudioBuffer out(reference.num_channels(), reference.num_samples(),
                  reference.sample_rate);
  out.channel_labels = reference.channel_labels;
  for (std::size_t c = 0; c < reference.num_channels(); ++c) {
    auto full = fft::convolve(reference.samples[c], rtf.impulse_response);
    std::copy_n(full.begin(), reference.num_samples(),
                out.samples[c].begin());
  }
  return out;
}

namespace {

std::string ir_filename(const std::string& talker, double direction_deg) {
  std::ostringstream name;
  name << "ir_" << talker << "_";
  char deg[32];
  std::snprintf(deg, sizeof(deg), "%07.2f", direction_deg);
  name << deg << ".wav";
  std::string s = name.str();
  for (auto& c : s)
    if (c == '/' || c == '\\' || c == ' ') c = '-';
  return s;
}

}  // namespace

void store_rtf_set(const RtfSet& set, const std::filesystem::path& dir) {
  set.validate();
  std::filesystem::create_directories(dir / "irs");

  json entries = json::array();
  for (const auto& talker : set.talkers()) {
    for (double deg : set.direction_grid()) {
      const Rtf& rtf = set.entry(talker, deg);
      const std::string file = ir_filename(talker, deg);
      save_wav(make_mono(rtf.impulse_response, rtf.sample_rate),
               dir / "irs" / file, WavDepth::Float64);
      entries.push_back({{"talker_id", talker},
                         {"direction_deg", deg},
                         {"file", "irs/" + file}});
    }
  }
  json index = {{"schema_version", 1},
                {"grid_tag", to_string(set.source_tag())},
                {"sample_rate", set.sample_rate()},
                {"ir_length", set.ir_length()},
                {"direction_grid", set.direction_grid()},
                {"entries", entries}};
  std::ofstream out(dir / "index.json", std::ios::trunc);
  if (!out)
    throw IoError("store_rtf_set: cannot write " +
                  (dir / "index.json").string());
  out << index.dump(2) << "\n";
}

RtfSet load_rtf_set(const std::filesystem::path& dir) {
  const auto index_path = dir / "index.json";
  std::ifstream in(index_path);
  if (!in) throw IoError("load_rtf_set: cannot open " + index_path.string());
  json index;
  try {
    in >> index;
  } catch (const json::exception& e) {
    throw SchemaError("load_rtf_set: invalid JSON in " + index_path.string() +
                      ": " + e.what());
  }

  try {
    if (index.at("schema_version").get<int>() != 1)
      throw SchemaError("load_rtf_set: unsupported schema version");
    RtfSet set(grid_tag_from_string(index.at("grid_tag").get<std::string>()),
               index.at("sample_rate").get<int>(),
               index.at("ir_length").get<std::size_t>());
    const auto grid = index.at("direction_grid").get<std::vector<double>>();
    for (const auto& entry : index.at("entries")) {
      const auto talker = entry.at("talker_id").get<std::string>();
      const auto deg = entry.at("direction_deg").get<double>();
      const auto file = entry.at("file").get<std::string>();
      auto ir_buffer = load_wav(dir / file);
      set.add(Rtf::from_impulse_response(
          std::vector<double>(mono_view(ir_buffer).begin(),
                              mono_view(ir_buffer).end()),
          deg, talker, ir_buffer.sample_rate, set.ir_length()));
    }
    if (set.direction_grid() != grid)
      throw SchemaError("load_rtf_set: direction_grid does not match the "
                        "stored entries");
    set.validate();
    return set;
  } catch (const json::exception& e) {
    throw SchemaError("load_rtf_set: schema violation in " +
                      index_path.string() + ": " + e.what());
  }
}

double select_direction(const RtfSet& set, Rng& rng) {
  const auto& grid = set.direction_grid();
  if (grid.empty()) throw InvalidArgument("select_direction: empty set");
  return grid[rng.pick_index(grid.size())];
}

std::string select_talker(const RtfSet& set, TalkerMode mode,
                          const std::string& own_talker, Rng& rng) {
  const auto all = set.talkers();
  if (all.empty()) throw InvalidArgument("select_talker: empty set");
  if (mode == TalkerMode::Individual) {
    if (!set.has_talker(own_talker))
      throw InvalidArgument("select_talker: own talker '" + own_talker +
                            "' is not in the RTF set");
    return own_talker;
  }
  std::vector<std::string> others;
  for (const auto& t : all)
    if (t != own_talker) others.push_back(t);
  if (others.empty())
    throw InvalidArgument("select_talker: no talker other than '" +
                          own_talker + "' available");
  return others[rng.pick_index(others.size())];
}

}  // namespace hearaug

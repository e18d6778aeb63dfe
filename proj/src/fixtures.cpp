#include "hearaug/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "hearaug/errors.hpp"
#include "hearaug/wav.hpp"

namespace hearaug {

namespace {

// Multiplies poly by (1 - c z^-1): one real zero at c.
void push_real_zero(std::vector<double>& poly, double c) {
  poly.push_back(0.0);
  for (std::size_t i = poly.size() - 1; i > 0; --i)
    poly[i] -= c * poly[i - 1];
}

// Multiplies poly by (1 - 2 r cos(w) z^-1 + r^2 z^-2): conjugate zero
// pair at radius r, angle w.
void push_zero_pair(std::vector<double>& poly, double r, double w) {
  const double b1 = -2.0 * r * std::cos(w);
  const double b2 = r * r;
  poly.resize(poly.size() + 2, 0.0);
  for (std::size_t i = poly.size() - 1; i-- > 0;) {
    if (i + 1 < poly.size()) poly[i + 1] += b1 * poly[i];
    if (i + 2 < poly.size()) poly[i + 2] += b2 * poly[i];
  }
}

// Impulse response of delay * B(z)/A(z), A monic up to a leading gain.
std::vector<double> rational_impulse_response(
    const std::vector<double>& b, const std::vector<double>& a,
    std::size_t delay, std::size_t length) {
  std::vector<double> y(length, 0.0);
  for (std::size_t n = 0; n < length; ++n) {
    double acc = 0.0;
    if (n >= delay && n - delay < b.size()) acc = b[n - delay];
    for (std::size_t k = 1; k < a.size() && k <= n; ++k)
      acc -= a[k] * y[n - k];
    y[n] = acc / a[0];
  }
  return y;
}

std::vector<double> one_pole_lowpass(std::span<const double> x,
                                     double cutoff_hz, int sample_rate) {
  const double a = std::exp(-2.0 * std::numbers::pi * cutoff_hz /
                            sample_rate);
  std::vector<double> y(x.size());
  double state = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    state = a * state + (1.0 - a) * x[i];
    y[i] = state;
  }
  return y;
}

void scale_to_rms(std::vector<double>& x, double target_rms) {
  const double r = rms(x);
  if (r <= 0.0) throw Error("fixture signal has zero energy");
  const double g = target_rms / r;
  for (double& v : x) v *= g;
}

std::string talker_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "t%02zu", i + 1);
  return buf;
}

}  // namespace

TransferPathPair make_transfer_paths(uint64_t seed,
                                     const std::string& talker,
                                     std::size_t direction_index,
                                     int sample_rate) {
  Rng rng = Rng::substream(seed, direction_index, "path:" + talker);

  // Zeros stay well inside the unit circle (radius <= 0.35) so the outer
  // spectrum spans at most ~20 dB in band. The Tikhonov floor in
  // compute_rtf is 1e-4 of the spectral peak, so that span keeps the
  // regularization bias below ~0.05 dB everywhere -- well inside the
  // 0.5 dB loop-closure budget.
  const std::size_t delay_outer = 4 + rng.pick_index(8);
  const std::size_t delay_inner = delay_outer + rng.pick_index(9);

  std::vector<double> poly_outer{1.0};
  push_real_zero(poly_outer, rng.uniform(-0.25, 0.25));
  push_real_zero(poly_outer, rng.uniform(-0.2, 0.2));
  push_zero_pair(poly_outer, rng.uniform(0.2, 0.35),
                 2.0 * std::numbers::pi * rng.uniform(200.0, 2800.0) /
                     sample_rate);

  std::vector<double> poly_inner{1.0};
  push_real_zero(poly_inner, rng.uniform(-0.3, 0.3));
  push_zero_pair(poly_inner, rng.uniform(0.25, 0.45),
                 2.0 * std::numbers::pi * rng.uniform(150.0, 1800.0) /
                     sample_rate);

  const double gain_outer = rng.uniform(0.7, 1.0);
  const double gain_inner = rng.uniform(0.5, 1.0);

  TransferPathPair pair;
  pair.ir_outer.assign(delay_outer, 0.0);
  for (double v : poly_outer) pair.ir_outer.push_back(gain_outer * v);
  pair.ir_inner.assign(delay_inner, 0.0);
  for (double v : poly_inner) pair.ir_inner.push_back(gain_inner * v);
  return pair;
}

RtfSet make_fixture_rtf_set(GridTag tag,
                            const std::vector<std::string>& talkers,
                            std::size_t n_directions, int sample_rate,
                            std::size_t ir_length, uint64_t seed) {
  if (talkers.empty())
    throw InvalidArgument("fixture RTF set needs at least one talker");
  if (n_directions == 0)
    throw InvalidArgument("fixture RTF set needs at least one direction");

  // Fold the grid identity into the seed so coarse and fine head sets
  // draw independent paths.
  const uint64_t set_seed =
      seed ^ fnv1a64(to_string(tag) + "/" + std::to_string(n_directions));

  RtfSet set(tag, sample_rate, ir_length);
  for (const std::string& talker : talkers) {
    for (std::size_t d = 0; d < n_directions; ++d) {
      const double direction = 360.0 * static_cast<double>(d) /
                               static_cast<double>(n_directions);
      TransferPathPair paths =
          make_transfer_paths(set_seed, talker, d, sample_rate);

      // The relative response inner/outer of a minimum-phase outer path
      // is causal and decaying; expand it directly as an IIR impulse
      // response instead of going through spectral division.
      std::size_t d_o = 0;
      while (d_o < paths.ir_outer.size() && paths.ir_outer[d_o] == 0.0)
        ++d_o;
      std::size_t d_i = 0;
      while (d_i < paths.ir_inner.size() && paths.ir_inner[d_i] == 0.0)
        ++d_i;
      std::vector<double> numer(paths.ir_inner.begin() +
                                    static_cast<std::ptrdiff_t>(d_i),
                                paths.ir_inner.end());
      std::vector<double> denom(paths.ir_outer.begin() +
                                    static_cast<std::ptrdiff_t>(d_o),
                                paths.ir_outer.end());
      std::vector<double> ir =
          rational_impulse_response(numer, denom, d_i - d_o, ir_length);
      set.add(Rtf::from_impulse_response(std::move(ir), direction, talker,
                                         sample_rate, ir_length));
    }
  }
  set.validate();
  return set;
}

std::vector<double> speech_like(double duration_s, int sample_rate,
                                Rng& rng) {
  if (!(duration_s > 0.0))
    throw InvalidArgument("fixture duration must be positive");
  const auto n =
      static_cast<std::size_t>(std::llround(duration_s * sample_rate));

  const double f0 = rng.uniform(90.0, 210.0);
  const double mod_hz = rng.uniform(2.5, 4.5);
  const double mod_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const auto n_harm = static_cast<std::size_t>(4200.0 / f0);
  std::vector<double> amp(n_harm), phase(n_harm);
  for (std::size_t h = 0; h < n_harm; ++h) {
    amp[h] = 1.0 / (1.0 + 0.35 * static_cast<double>(h));
    phase[h] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double v = 0.0;
    for (std::size_t h = 0; h < n_harm; ++h)
      v += amp[h] * std::sin(2.0 * std::numbers::pi * f0 *
                                 static_cast<double>(h + 1) * t +
                             phase[h]);
    // Syllabic-rate amplitude modulation between 0.3 and 1.0, plus a low
    // white floor so every one-third-octave band carries some energy.
    const double mod =
        0.3 + 0.7 * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * mod_hz *
                                              t +
                                          mod_phase));
    x[i] = mod * v + 1e-3 * rng.gaussian();
  }
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  for (double& v : x) v *= 0.25 / peak;
  return x;
}

std::vector<double> noise_like(double duration_s, int sample_rate,
                               Rng& rng) {
  if (!(duration_s > 0.0))
    throw InvalidArgument("fixture duration must be positive");
  const auto n =
      static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  const double a = rng.uniform(0.8, 0.95);
  std::vector<double> x(n);
  double state = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    state = a * state + rng.gaussian();
    x[i] = state;
  }
  scale_to_rms(x, 0.1);
  return x;
}

SpeechPair make_fixture_speech_pair(const std::string& talker_id,
                                    double duration_s, int sample_rate,
                                    Rng& rng) {
  std::vector<double> s_om = speech_like(duration_s, sample_rate, rng);

  // Occlusion shaping: strong low-frequency emphasis, attenuated highs,
  // with a small direct leak.
  std::vector<double> lp1 = one_pole_lowpass(s_om, 1200.0, sample_rate);
  std::vector<double> lp2 = one_pole_lowpass(lp1, 400.0, sample_rate);
  std::vector<double> s_im(s_om.size());
  for (std::size_t i = 0; i < s_im.size(); ++i)
    s_im[i] = 1.2 * lp1[i] + 1.5 * lp2[i] + 0.05 * s_om[i];

  // Body-produced rumble: heavily lowpassed noise at a low level.
  std::vector<double> rumble(s_om.size());
  for (double& v : rumble) v = rng.gaussian();
  rumble = one_pole_lowpass(rumble, 150.0, sample_rate);
  rumble = one_pole_lowpass(rumble, 150.0, sample_rate);
  scale_to_rms(rumble, 0.015);

  SpeechPair pair;
  pair.s_om = make_mono(std::move(s_om), sample_rate, "s_om");
  pair.s_im = make_mono(std::move(s_im), sample_rate, "s_im");
  pair.body_im = make_mono(std::move(rumble), sample_rate, "body_im");
  pair.talker_id = talker_id;
  return pair;
}

void FixtureSpec::validate() const {
  if (n_talkers == 0) throw InvalidArgument("need at least one talker");
  if (n_utterances_per_talker == 0)
    throw InvalidArgument("need at least one utterance per talker");
  if (n_noise == 0) throw InvalidArgument("need at least one noise file");
  if (n_directions == 0 || n_fine_directions == 0)
    throw InvalidArgument("direction grids must be non-empty");
  if (sample_rate != kPipelineSampleRate)
    throw InvalidArgument("fixtures are generated at 16 kHz only");
  if (!(speech_duration_s > 0.0) || !(noise_duration_s > 0.0))
    throw InvalidArgument("fixture durations must be positive");
}

std::filesystem::path write_fixture_corpus(const std::filesystem::path& dir,
                                           const FixtureSpec& spec) {
  namespace fs = std::filesystem;
  spec.validate();
  fs::create_directories(dir / "speech");
  fs::create_directories(dir / "noise");
  fs::create_directories(dir / "rtf");

  std::vector<std::string> talkers;
  for (std::size_t i = 0; i < spec.n_talkers; ++i)
    talkers.push_back(talker_name(i));

  store_rtf_set(make_fixture_rtf_set(GridTag::Individual, talkers,
                                     spec.n_directions, spec.sample_rate,
                                     spec.ir_length, spec.seed),
                dir / "rtf" / "individual");
  store_rtf_set(make_fixture_rtf_set(GridTag::AhCoarse, {"AH"},
                                     spec.n_directions, spec.sample_rate,
                                     spec.ir_length, spec.seed),
                dir / "rtf" / "ah-coarse");
  store_rtf_set(make_fixture_rtf_set(GridTag::AhFine, {"AH"},
                                     spec.n_fine_directions,
                                     spec.sample_rate, spec.ir_length,
                                     spec.seed),
                dir / "rtf" / "ah-fine");

  nlohmann::json speech_list = nlohmann::json::array();
  for (std::size_t i = 0; i < spec.n_talkers; ++i) {
    for (std::size_t j = 0; j < spec.n_utterances_per_talker; ++j) {
      Rng rng = Rng::substream(spec.seed, i * 1000 + j, "fixture-speech");
      SpeechPair pair = make_fixture_speech_pair(
          talkers[i], spec.speech_duration_s, spec.sample_rate, rng);

      AudioBuffer tracks(3, pair.num_samples(), spec.sample_rate);
      tracks.channel(0) = pair.s_om.channel(0);
      tracks.channel(1) = pair.s_im.channel(0);
      tracks.channel(2) = pair.body_im->channel(0);
      tracks.channel_labels = {"s_om", "s_im", "body_im"};

      char utt[16];
      std::snprintf(utt, sizeof(utt), "u%02zu", j);
      const std::string name = talkers[i] + "_" + utt;
      const std::string rel = "speech/" + name + ".wav";
      save_wav(tracks, dir / rel, WavDepth::Float32);
      speech_list.push_back({{"talker_id", talkers[i]},
                             {"utterance_id", name},
                             {"path", rel},
                             {"duration_samples", tracks.num_samples()}});
    }
  }

  nlohmann::json noise_list = nlohmann::json::array();
  for (std::size_t k = 0; k < spec.n_noise; ++k) {
    Rng rng = Rng::substream(spec.seed, k, "fixture-noise");
    AudioBuffer buf = make_mono(
        noise_like(spec.noise_duration_s, spec.sample_rate, rng),
        spec.sample_rate, "noise");
    char id[16];
    std::snprintf(id, sizeof(id), "n%03zu", k);
    const std::string rel = std::string("noise/") + id + ".wav";
    save_wav(buf, dir / rel, WavDepth::Float32);
    noise_list.push_back({{"noise_id", std::string(id)},
                          {"path", rel},
                          {"duration_samples", buf.num_samples()}});
  }

  nlohmann::json index = {
      {"schema_version", 1},
      {"sample_rate", spec.sample_rate},
      {"speech", speech_list},
      {"noise", noise_list},
      {"rtf_sets",
       {{"individual", "rtf/individual"},
        {"ah-coarse", "rtf/ah-coarse"},
        {"ah-fine", "rtf/ah-fine"}}},
  };
  const fs::path index_path = dir / "corpus.json";
  std::ofstream out(index_path);
  if (!out) throw IoError("cannot write " + index_path.string());
  out << index.dump(2) << '\n';
  return index_path;
}

}  // namespace hearaug

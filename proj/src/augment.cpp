#include "hearaug/augment.hpp"

#include <cmath>
#include <cstdint>

#include "hearaug/errors.hpp"

namespace hearaug {

std::string to_string(AugmentMethod m) {
  switch (m) {
    case AugmentMethod::NoImNoise: return "no-im-noise";
    case AugmentMethod::ArtificialHead: return "artificial-head";
    case AugmentMethod::ArtificialHeadFine: return "artificial-head-fine";
    case AugmentMethod::NonIndividual: return "non-individual";
    case AugmentMethod::Individual: return "individual";
  }
  throw InvalidArgument("unknown augmentation method enum value");
}

AugmentMethod augment_method_from_string(const std::string& s) {
  if (s == "no-im-noise") return AugmentMethod::NoImNoise;
  if (s == "artificial-head") return AugmentMethod::ArtificialHead;
  if (s == "artificial-head-fine") return AugmentMethod::ArtificialHeadFine;
  if (s == "non-individual") return AugmentMethod::NonIndividual;
  if (s == "individual") return AugmentMethod::Individual;
  throw InvalidArgument("unknown augmentation method '" + s +
                        "' (expected no-im-noise, artificial-head, "
                        "artificial-head-fine, non-individual, individual)");
}

std::string to_string(SourceMode m) {
  switch (m) {
    case SourceMode::SingleSource: return "single";
    case SourceMode::PseudoDiffuse: return "diffuse";
    case SourceMode::RandomEachRecord: return "random";
  }
  throw InvalidArgument("unknown source mode enum value");
}

SourceMode source_mode_from_string(const std::string& s) {
  if (s == "single") return SourceMode::SingleSource;
  if (s == "diffuse") return SourceMode::PseudoDiffuse;
  if (s == "random") return SourceMode::RandomEachRecord;
  throw InvalidArgument("unknown source mode '" + s +
                        "' (expected single, diffuse, random)");
}

void DecorrelationSampler::validate() const {
  if (!(p_off >= 0.0 && p_off <= 1.0))
    throw InvalidArgument("decorrelation p_off must lie in [0, 1]");
  if (!(max_db <= -60.0))
    throw InvalidArgument(
        "decorrelation level must never exceed -60 dB; got max_db = " +
        std::to_string(max_db));
  if (!(min_db <= max_db))
    throw InvalidArgument("decorrelation min_db must not exceed max_db");
}

double DecorrelationSampler::sample(Rng& rng) const {
  validate();
  if (rng.uniform() < p_off) return kNoDecorrelation;
  return rng.uniform(min_db, max_db);
}

void AugmentationPolicy::validate() const {
  if (!(p_single >= 0.0 && p_single <= 1.0))
    throw InvalidArgument("p_single must lie in [0, 1]");
  if (!(diffuse_delay_s > 0.0))
    throw InvalidArgument("diffuse_delay_s must be positive");
  decorrelation.validate();
}

std::vector<double> circular_shift(std::span<const double> x,
                                   std::size_t shift) {
  const std::size_t n = x.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  shift %= n;
  // out[i] = x[(i - shift) mod n]: copy the tail of x to the front.
  for (std::size_t i = 0; i < n; ++i)
    out[(i + shift) % n] = x[i];
  return out;
}

AudioBuffer add_decorrelation_noise(const AudioBuffer& im, double level_db,
                                    Rng& rng) {
  if (level_db == kNoDecorrelation) return im;
  if (!(level_db <= -60.0))
    throw InvalidArgument(
        "decorrelation level must be <= -60 dB or -inf; got " +
        std::to_string(level_db));
  auto x = mono_view(im);
  const double im_energy = signal_energy(x);
  // A silent IM channel (NoImNoise) gets no noise: the target energy is
  // zero, so the scale would be zero anyway.
  if (im_energy == 0.0) return im;

  std::vector<double> noise(x.size());
  for (double& w : noise) w = rng.gaussian();
  const double noise_energy = signal_energy(noise);
  if (noise_energy <= 0.0)
    throw Error("white noise draw produced zero energy");
  const double scale =
      std::sqrt(std::pow(10.0, level_db / 10.0) * im_energy / noise_energy);

  AudioBuffer out = im;
  auto& y = out.channel(0);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += scale * noise[i];
  return out;
}

SourceMode sample_source_mode(const AugmentationPolicy& policy, Rng& rng) {
  if (policy.source_mode != SourceMode::RandomEachRecord)
    throw InvalidArgument(
        "sample_source_mode requires source_mode = random");
  return rng.bernoulli(policy.p_single) ? SourceMode::SingleSource
                                        : SourceMode::PseudoDiffuse;
}

std::string choose_rtf_talker(AugmentMethod method, const RtfSet& set,
                              const std::string& own_talker, Rng& rng) {
  switch (method) {
    case AugmentMethod::NoImNoise:
      return "";
    case AugmentMethod::ArtificialHead:
    case AugmentMethod::ArtificialHeadFine: {
      auto talkers = set.talkers();
      if (talkers.size() != 1)
        throw SchemaError(
            "artificial-head methods expect a set with exactly one head "
            "tag; found " +
            std::to_string(talkers.size()) + " talkers");
      return talkers.front();
    }
    case AugmentMethod::NonIndividual:
      return select_talker(set, TalkerMode::NonIndividual, own_talker, rng);
    case AugmentMethod::Individual:
      return select_talker(set, TalkerMode::Individual, own_talker, rng);
  }
  throw InvalidArgument("unknown augmentation method enum value");
}

namespace {

const RtfSet& require_set(const RtfSet* set, AugmentMethod method) {
  if (set == nullptr)
    throw InvalidArgument("method " + to_string(method) +
                          " requires an RTF set");
  return *set;
}

}  // namespace

NoisePair render_single_source(const AudioBuffer& reference,
                               const RtfSet* rtf_set, AugmentMethod method,
                               const std::string& talker,
                               double direction_deg, double level_db,
                               Rng& white_rng) {
  require_sample_rate(reference, kPipelineSampleRate, "noise reference");
  auto ref = mono_view(reference);

  NoisePair pair;
  pair.om = make_mono(std::vector<double>(ref.begin(), ref.end()),
                      reference.sample_rate, "om");
  pair.provenance.method = method;
  pair.provenance.mode = SourceMode::SingleSource;

  if (method == AugmentMethod::NoImNoise) {
    pair.im = make_mono(std::vector<double>(ref.size(), 0.0),
                        reference.sample_rate, "im");
    return pair;
  }

  const RtfSet& set = require_set(rtf_set, method);
  AudioBuffer im = apply_rtf(pair.om, set.entry(talker, direction_deg));
  im.channel_labels = {"im"};
  pair.im = add_decorrelation_noise(im, level_db, white_rng);
  pair.provenance.rtf_talker = talker;
  pair.provenance.directions_deg = {direction_deg};
  pair.provenance.decorrelation_db = level_db;
  return pair;
}

NoisePair render_diffuse(const AudioBuffer& reference, const RtfSet* rtf_set,
                         AugmentMethod method, const std::string& talker,
                         double level_db, double delay_s, Rng& white_rng) {
  require_sample_rate(reference, kPipelineSampleRate, "noise reference");
  if (!(delay_s > 0.0))
    throw InvalidArgument("diffuse delay must be positive");
  auto ref = mono_view(reference);
  const std::size_t n = ref.size();
  if (n == 0) throw InvalidArgument("noise reference is empty");

  NoisePair pair;
  pair.provenance.method = method;
  pair.provenance.mode = SourceMode::PseudoDiffuse;
  pair.provenance.diffuse_delay_s = delay_s;

  if (method == AugmentMethod::NoImNoise) {
    // Zeros stay zeros under summation; flagged so callers can notice the
    // degenerate combination.
    pair.om = make_mono(std::vector<double>(ref.begin(), ref.end()),
                        reference.sample_rate, "om");
    pair.im = make_mono(std::vector<double>(n, 0.0),
                        reference.sample_rate, "im");
    pair.provenance.zero_im = true;
    return pair;
  }

  const RtfSet& set = require_set(rtf_set, method);
  const std::vector<double>& grid = set.direction_grid();
  if (grid.empty()) throw SchemaError("RTF set has an empty direction grid");

  const double delay_samples_f =
      delay_s * static_cast<double>(reference.sample_rate);
  std::vector<double> om_sum(n, 0.0);
  std::vector<double> im_sum(n, 0.0);

  // Sum the per-direction renders in ascending grid order; the totals are
  // the plain left-to-right sums, so a brute-force recomputation matches
  // bit for bit.
  for (std::size_t d = 0; d < grid.size(); ++d) {
    const std::size_t shift = static_cast<std::size_t>(
        std::llround(static_cast<double>(d) * delay_samples_f));
    pair.provenance.shift_samples.push_back(shift);
    pair.provenance.directions_deg.push_back(grid[d]);

    std::vector<double> shifted = circular_shift(ref, shift);
    AudioBuffer shifted_buf =
        make_mono(std::move(shifted), reference.sample_rate, "om");
    AudioBuffer rendered = apply_rtf(shifted_buf, set.entry(talker, grid[d]));
    const auto& s = shifted_buf.channel(0);
    const auto& r = rendered.channel(0);
    for (std::size_t i = 0; i < n; ++i) {
      om_sum[i] += s[i];
      im_sum[i] += r[i];
    }
  }

  // Shifts that reach or pass the reference length wrap around and
  // overlap earlier copies; deterministic, but worth surfacing.
  pair.provenance.wrapped_shifts =
      static_cast<double>(n) <
      static_cast<double>(grid.size()) * delay_samples_f;

  pair.om = make_mono(std::move(om_sum), reference.sample_rate, "om");
  AudioBuffer im = make_mono(std::move(im_sum), reference.sample_rate, "im");
  pair.im = add_decorrelation_noise(im, level_db, white_rng);
  pair.provenance.rtf_talker = talker;
  pair.provenance.decorrelation_db = level_db;
  return pair;
}

NoisePair augment_single_source(const AudioBuffer& reference,
                                const AugmentationPolicy& policy,
                                const RtfSet* rtf_set,
                                const std::string& own_talker, Rng& rng) {
  policy.validate();
  if (policy.method == AugmentMethod::NoImNoise)
    return render_single_source(reference, nullptr, policy.method, "",
                                0.0, kNoDecorrelation, rng);

  const RtfSet& set = require_set(rtf_set, policy.method);
  // Draw order is part of the determinism contract: talker, direction,
  // decorrelation level, then white noise inside the render.
  const std::string talker =
      choose_rtf_talker(policy.method, set, own_talker, rng);
  const double direction = select_direction(set, rng);
  const double level = policy.decorrelation.sample(rng);
  return render_single_source(reference, rtf_set, policy.method, talker,
                              direction, level, rng);
}

NoisePair synthesize_diffuse(const AudioBuffer& reference,
                             const AugmentationPolicy& policy,
                             const RtfSet* rtf_set,
                             const std::string& own_talker, Rng& rng) {
  policy.validate();
  if (policy.method == AugmentMethod::NoImNoise)
    return render_diffuse(reference, nullptr, policy.method, "",
                          kNoDecorrelation, policy.diffuse_delay_s, rng);

  const RtfSet& set = require_set(rtf_set, policy.method);
  const std::string talker =
      choose_rtf_talker(policy.method, set, own_talker, rng);
  const double level = policy.decorrelation.sample(rng);
  return render_diffuse(reference, rtf_set, policy.method, talker, level,
                        policy.diffuse_delay_s, rng);
}

NoisePair augment(const AudioBuffer& reference,
                  const AugmentationPolicy& policy, const RtfSet* rtf_set,
                  const std::string& own_talker, Rng& rng) {
  policy.validate();
  SourceMode mode = policy.source_mode;
  if (policy.method == AugmentMethod::NoImNoise) {
    // No directional structure to diffuse; keep these records
    // single-source and spend no draws.
    mode = SourceMode::SingleSource;
  } else if (mode == SourceMode::RandomEachRecord) {
    mode = sample_source_mode(policy, rng);
  }
  if (mode == SourceMode::SingleSource)
    return augment_single_source(reference, policy, rtf_set, own_talker,
                                 rng);
  return synthesize_diffuse(reference, policy, rtf_set, own_talker, rng);
}

}  // namespace hearaug

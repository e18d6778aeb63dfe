#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hearaug/audio.hpp"
#include "hearaug/rng.hpp"
#include "hearaug/rtf.hpp"

namespace hearaug {

enum class AugmentMethod {
  NoImNoise,
  ArtificialHead,
  ArtificialHeadFine,
  NonIndividual,
  Individual,
};

std::string to_string(AugmentMethod m);
AugmentMethod augment_method_from_string(const std::string& s);

enum class SourceMode { SingleSource, PseudoDiffuse, RandomEachRecord };

std::string to_string(SourceMode m);
SourceMode source_mode_from_string(const std::string& s);

// Sampler for the coherence-reducing white-noise level: with probability
// p_off returns -inf (no noise), otherwise uniform in dB over
// [min_db, max_db]. max_db never exceeds -60 dB.
struct DecorrelationSampler {
  double p_off = 0.1;
  double min_db = -100.0;
  double max_db = -60.0;

  double sample(Rng& rng) const;
  void validate() const;
};

struct AugmentationPolicy {
  AugmentMethod method = AugmentMethod::Individual;
  SourceMode source_mode = SourceMode::RandomEachRecord;
  double p_single = 0.5;
  DecorrelationSampler decorrelation;
  double diffuse_delay_s = 1.0;
  uint64_t master_seed = 0;

  void validate() const;
};

// Everything needed to replay a noise render from the same reference.
struct NoiseProvenance {
  AugmentMethod method = AugmentMethod::NoImNoise;
  SourceMode mode = SourceMode::SingleSource;
  std::string rtf_talker;             // empty for NoImNoise
  std::vector<double> directions_deg; // one entry (single) or the grid
  double decorrelation_db = -std::numeric_limits<double>::infinity();
  double diffuse_delay_s = 0.0;
  std::vector<std::size_t> shift_samples;  // per direction, diffuse only
  bool wrapped_shifts = false;  // reference shorter than grid * delay
  bool zero_im = false;         // NoImNoise rendered as diffuse
};

// Simulated two-channel noise: OM plus IM views of one reference
// recording.
struct NoisePair {
  AudioBuffer om;
  AudioBuffer im;
  NoiseProvenance provenance;
};

constexpr double kNoDecorrelation =
    -std::numeric_limits<double>::infinity();

// Adds Gaussian white noise scaled so that
// energy(noise)/energy(im) = 10^(level_db/10). level_db must be <= -60;
// -inf returns the input unchanged.
AudioBuffer add_decorrelation_noise(const AudioBuffer& im, double level_db,
                                    Rng& rng);

// Bernoulli(p_single) draw; policy.source_mode must be RandomEachRecord.
SourceMode sample_source_mode(const AugmentationPolicy& policy, Rng& rng);

// Renders with all choices already made. The OM channel is the reference
// itself (single source) or the sum of the shifted copies (diffuse).
// These are the deterministic cores used by both the sampling frontends
// below and manifest-driven dataset generation.
NoisePair render_single_source(const AudioBuffer& reference,
                               const RtfSet* rtf_set,
                               AugmentMethod method,
                               const std::string& talker,
                               double direction_deg, double level_db,
                               Rng& white_rng);
NoisePair render_diffuse(const AudioBuffer& reference, const RtfSet* rtf_set,
                         AugmentMethod method, const std::string& talker,
                         double level_db, double delay_s, Rng& white_rng);

// Sampling frontends: draw (talker, direction, level) per the policy and
// render. Draw order: talker, direction, decorrelation level, white noise.
NoisePair augment_single_source(const AudioBuffer& reference,
                                const AugmentationPolicy& policy,
                                const RtfSet* rtf_set,
                                const std::string& own_talker, Rng& rng);
NoisePair synthesize_diffuse(const AudioBuffer& reference,
                             const AugmentationPolicy& policy,
                             const RtfSet* rtf_set,
                             const std::string& own_talker, Rng& rng);

// Dispatcher: samples the source mode if the policy says RandomEachRecord,
// then defers to one of the two synthesizers. NoImNoise records are always
// single-source (the method has no directional structure).
NoisePair augment(const AudioBuffer& reference,
                  const AugmentationPolicy& policy, const RtfSet* rtf_set,
                  const std::string& own_talker, Rng& rng);

// Which talker's RTFs a record uses: the head tag for artificial-head
// methods (no draw), a random other talker for non-individual, the
// speaker's own for individual, none for no-im-noise.
std::string choose_rtf_talker(AugmentMethod method, const RtfSet& set,
                              const std::string& own_talker, Rng& rng);

// Circular delay: out[i] = x[(i - shift) mod len].
std::vector<double> circular_shift(std::span<const double> x,
                                   std::size_t shift);

}  // namespace hearaug

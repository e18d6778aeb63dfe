#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hearaug/audio.hpp"
#include "hearaug/mixing.hpp"
#include "hearaug/rng.hpp"
#include "hearaug/rtf.hpp"

namespace hearaug {

// Synthetic stand-ins for the non-redistributable corpora: parametric
// outer/inner transfer paths, harmonic speech-like signals, and colored
// noise, all derived from a seed so the whole test corpus is
// reproducible.

// Minimum-phase FIR pair modeling one acoustic path to the outer and
// inner microphone. The inner path is delayed at least as much as the
// outer one, so the relative response between them stays causal.
struct TransferPathPair {
  std::vector<double> ir_outer;
  std::vector<double> ir_inner;
};

// Draws a path pair for (talker, direction). Spectra are kept within a
// bounded dynamic range so regularized deconvolution stays accurate.
TransferPathPair make_transfer_paths(uint64_t seed,
                                     const std::string& talker,
                                     std::size_t direction_index,
                                     int sample_rate);

// Builds an RTF set on a uniform direction grid of n_directions spanning
// [0, 360). Each entry is the exact relative response of a drawn path
// pair, expanded to ir_length taps.
RtfSet make_fixture_rtf_set(GridTag tag,
                            const std::vector<std::string>& talkers,
                            std::size_t n_directions, int sample_rate,
                            std::size_t ir_length, uint64_t seed);

// Harmonic complex with syllabic amplitude modulation and a low white
// floor; peak-normalized. Serves as deterministic "speech".
std::vector<double> speech_like(double duration_s, int sample_rate,
                                Rng& rng);

// One-pole lowpassed white noise, RMS-normalized. Serves as "noise".
std::vector<double> noise_like(double duration_s, int sample_rate,
                               Rng& rng);

// Speech triple for one utterance: OM speech, an occlusion-shaped IM
// version (low-frequency emphasis, band-limited), and low-level body
// rumble on the IM.
SpeechPair make_fixture_speech_pair(const std::string& talker_id,
                                    double duration_s, int sample_rate,
                                    Rng& rng);

struct FixtureSpec {
  std::size_t n_talkers = 4;
  std::size_t n_utterances_per_talker = 3;
  std::size_t n_noise = 6;
  double speech_duration_s = 5.0;
  double noise_duration_s = 12.0;
  std::size_t n_directions = 8;        // individual + coarse head grids
  std::size_t n_fine_directions = 48;  // fine head grid
  int sample_rate = kPipelineSampleRate;
  std::size_t ir_length = kDefaultRtfIrLength;
  uint64_t seed = 0;

  void validate() const;
};

// Writes a complete corpus under dir:
//   speech/<talker>_<utt>.wav   3-channel (s_om, s_im, body_im), float32
//   noise/<id>.wav              mono float32
//   rtf/individual, rtf/ah-coarse, rtf/ah-fine   RTF set directories
//   corpus.json                 index referencing everything
// Returns the corpus index path.
std::filesystem::path write_fixture_corpus(const std::filesystem::path& dir,
                                           const FixtureSpec& spec);

}  // namespace hearaug

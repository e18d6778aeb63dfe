#pragma once

#include "hearaug/audio.hpp"

namespace hearaug {

// Exponential (logarithmic) sine sweep specification. The measurement
// configuration for the shipped RTF sets is 80 Hz to 22.05 kHz over 3 s.
struct SweepSpec {
  double f_start = 80.0;    // Hz
  double f_end = 22050.0;   // Hz
  double duration = 3.0;    // seconds
  int sample_rate = 44100;  // Hz
  double amplitude = 0.9;   // full-scale fraction

  void validate() const;
  std::size_t num_samples() const;
};

// Sweep plus its matched inverse filter (amplitude-compensated
// time-reversed sweep, calibrated so sweep (*) inverse peaks at 1 at lag 0).
struct SweepSignals {
  AudioBuffer sweep;
  AudioBuffer inverse_filter;
};

SweepSignals generate_sweep(const SweepSpec& spec);

// Deconvolves a recording captured while the sweep was played and returns
// the linear impulse response, truncated to ir_length taps starting at lag
// zero. Harmonic distortion images land at negative lags and are excluded.
std::vector<double> deconvolve_ir(const AudioBuffer& recording,
                                  const SweepSpec& spec,
                                  std::size_t ir_length);

}  // namespace hearaug

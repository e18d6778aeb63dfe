#pragma once

#include <span>
#include <vector>

#include "hearaug/audio.hpp"

namespace hearaug {

// Short-time objective intelligibility: mean clipped correlation between
// one-third-octave band envelopes of the clean and degraded signals over
// 384 ms segments at a 10 kHz working rate. Inputs are 16 kHz,
// equal-length; the resampling to 10 kHz is part of the metric.
double stoi(const AudioBuffer& clean, const AudioBuffer& degraded);

// The metric's polyphase 16 kHz -> 10 kHz resampler (windowed-sinc,
// Kaiser beta = 5), exposed for direct testing.
std::vector<double> stoi_resample_to_10k(std::span<const double> x_16k);

}  // namespace hearaug

#pragma once

#include <filesystem>

#include "hearaug/audio.hpp"

namespace hearaug {

enum class WavDepth { Int16, Int24, Int32, Float32, Float64 };

// Reads a PCM RIFF/WAVE file (16/24/32-bit int, 32/64-bit float,
// little-endian). Integer samples are normalized by 2^(bits-1) so that
// the most negative code maps to exactly -1.0.
// Throws IoError if the file cannot be read, FormatError for non-PCM or
// malformed content.
AudioBuffer load_wav(const std::filesystem::path& path);

// Writes the buffer at the chosen depth. Integer depths clamp to the
// representable code range; NaN or Inf samples are rejected.
void save_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
              WavDepth depth = WavDepth::Float32);

}  // namespace hearaug

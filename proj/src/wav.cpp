#include "hearaug/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "hearaug/errors.hpp"

namespace hearaug {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatIeeeFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void append_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 24) & 0xFF));
}

void append_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xFF));
  out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
}

void append_tag(std::vector<uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct DepthInfo {
  uint16_t bits;
  uint16_t format;
};

DepthInfo depth_info(WavDepth depth) {
  switch (depth) {
    case WavDepth::Int16:
      return {16, kFormatPcm};
    case WavDepth::Int24:
      return {24, kFormatPcm};
    case WavDepth::Int32:
      return {32, kFormatPcm};
    case WavDepth::Float32:
      return {32, kFormatIeeeFloat};
    case WavDepth::Float64:
      return {64, kFormatIeeeFloat};
  }
  throw InvalidArgument("save_wav: unknown depth");
}

int64_t clamp_code(double scaled, int64_t lo, int64_t hi) {
  const double r = std::nearbyint(scaled);
  if (r <= static_cast<double>(lo)) return lo;
  if (r >= static_cast<double>(hi)) return hi;
  return static_cast<int64_t>(r);
}

}  // namespace

AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_wav: cannot open " + path.string());
  std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
  if (raw.size() < 12 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
    throw FormatError("load_wav: not a RIFF/WAVE file: " + path.string());

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const uint8_t* data = nullptr;
  std::size_t data_size = 0;

  // Walk chunks; unknown chunks are skipped (with odd-size pad bytes).
  std::size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    const char* id = reinterpret_cast<const char*>(raw.data() + pos);
    const uint32_t size = read_u32(raw.data() + pos + 4);
    pos += 8;
    if (pos + size > raw.size())
      throw FormatError("load_wav: truncated chunk in " + path.string());
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("load_wav: fmt chunk too small");
      format = read_u16(raw.data() + pos);
      channels = read_u16(raw.data() + pos + 2);
      rate = read_u32(raw.data() + pos + 4);
      bits = read_u16(raw.data() + pos + 14);
      if (format == kFormatExtensible) {
        if (size < 40)
          throw FormatError("load_wav: extensible fmt chunk too small");
        // SubFormat GUID starts at offset 24; first two bytes carry the tag.
        format = read_u16(raw.data() + pos + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data = raw.data() + pos;
      data_size = size;
    }
    pos += size + (size & 1);
  }

  if (!have_fmt || data == nullptr)
    throw FormatError("load_wav: missing fmt or data chunk in " +
                      path.string());
  if (channels == 0 || rate == 0)
    throw FormatError("load_wav: invalid fmt values in " + path.string());
  if (format != kFormatPcm && format != kFormatIeeeFloat)
    throw FormatError("load_wav: unsupported encoding (format tag " +
                      std::to_string(format) + "); only PCM int and IEEE "
                      "float are supported");
  if (format == kFormatPcm && bits != 16 && bits != 24 && bits != 32)
    throw FormatError("load_wav: unsupported PCM bit depth " +
                      std::to_string(bits));
  if (format == kFormatIeeeFloat && bits != 32 && bits != 64)
    throw FormatError("load_wav: unsupported float bit depth " +
                      std::to_string(bits));

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t frames = data_size / frame_bytes;

  AudioBuffer buffer(channels, frames, static_cast<int>(rate));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const uint8_t* p = data + (i * channels + c) * bytes_per_sample;
      double value = 0.0;
      if (format == kFormatIeeeFloat && bits == 32) {
        uint32_t u = read_u32(p);
        value = static_cast<double>(std::bit_cast<float>(u));
      } else if (format == kFormatIeeeFloat && bits == 64) {
        uint64_t u = static_cast<uint64_t>(read_u32(p)) |
                     (static_cast<uint64_t>(read_u32(p + 4)) << 32);
        value = std::bit_cast<double>(u);
      } else if (bits == 16) {
        auto v = static_cast<int16_t>(read_u16(p));
        value = static_cast<double>(v) / 32768.0;
      } else if (bits == 24) {
        int32_t v = static_cast<int32_t>(p[0]) |
                    (static_cast<int32_t>(p[1]) << 8) |
                    (static_cast<int32_t>(p[2]) << 16);
        if (v & 0x800000) v |= ~0xFFFFFF;  // sign-extend
        value = static_cast<double>(v) / 8388608.0;
      } else {  // 32-bit int
        auto v = static_cast<int32_t>(read_u32(p));
        value = static_cast<double>(v) / 2147483648.0;
      }
      buffer.samples[c][i] = value;
    }
  }
  return buffer;
}

void save_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
              WavDepth depth) {
  buffer.validate();
  for (const auto& ch : buffer.samples)
    for (double v : ch)
      if (!std::isfinite(v))
        throw InvalidArgument("save_wav: buffer contains NaN or Inf");

  const auto [bits, format] = depth_info(depth);
  const auto channels = static_cast<uint16_t>(buffer.num_channels());
  const std::size_t frames = buffer.num_samples();
  const std::size_t bytes_per_sample = bits / 8;
  const uint32_t data_size =
      static_cast<uint32_t>(frames * channels * bytes_per_sample);

  std::vector<uint8_t> out;
  out.reserve(44 + data_size);
  append_tag(out, "RIFF");
  append_u32(out, 36 + data_size);
  append_tag(out, "WAVE");
  append_tag(out, "fmt ");
  append_u32(out, 16);
  append_u16(out, format);
  append_u16(out, channels);
  append_u32(out, static_cast<uint32_t>(buffer.sample_rate));
  append_u32(out, static_cast<uint32_t>(buffer.sample_rate) * channels *
                      static_cast<uint32_t>(bytes_per_sample));
  append_u16(out, static_cast<uint16_t>(channels * bytes_per_sample));
  append_u16(out, bits);
  append_tag(out, "data");
  append_u32(out, data_size);

  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = buffer.samples[c][i];
      switch (depth) {
        case WavDepth::Int16: {
          auto code = static_cast<int16_t>(
              clamp_code(v * 32768.0, -32768, 32767));
          append_u16(out, static_cast<uint16_t>(code));
          break;
        }
        case WavDepth::Int24: {
          auto code = static_cast<int32_t>(
              clamp_code(v * 8388608.0, -8388608, 8388607));
          out.push_back(static_cast<uint8_t>(code & 0xFF));
          out.push_back(static_cast<uint8_t>((code >> 8) & 0xFF));
          out.push_back(static_cast<uint8_t>((code >> 16) & 0xFF));
          break;
        }
        case WavDepth::Int32: {
          auto code = static_cast<int32_t>(
              clamp_code(v * 2147483648.0, INT32_MIN, INT32_MAX));
          append_u32(out, static_cast<uint32_t>(code));
          break;
        }
        case WavDepth::Float32: {
          append_u32(out, std::bit_cast<uint32_t>(static_cast<float>(v)));
          break;
        }
        case WavDepth::Float64: {
          uint64_t u = std::bit_cast<uint64_t>(v);
          append_u32(out, static_cast<uint32_t>(u & 0xFFFFFFFFull));
          append_u32(out, static_cast<uint32_t>(u >> 32));
          break;
        }
      }
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("save_wav: cannot open " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("save_wav: write failed for " + path.string());
}

}  // namespace hearaug

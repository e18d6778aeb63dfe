#pragma once

#include <complex>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hearaug/audio.hpp"
#include "hearaug/rng.hpp"

namespace hearaug {

constexpr std::size_t kDefaultRtfIrLength = 512;

// Relative transfer function between the outer and inner microphone for
// one (talker, direction) pair. freq_response is the one-sided DFT of
// impulse_response at the impulse response length, kept consistent on
// construction.
struct Rtf {
  std::vector<std::complex<double>> freq_response;
  std::vector<double> impulse_response;
  double direction_deg = 0.0;
  std::string talker_id;  // talker identifier, or "AH" for artificial head
  int sample_rate = 0;

  // Pads or truncates the impulse response to ir_length taps and derives
  // the frequency response from it. ir_length must be a power of two.
  static Rtf from_impulse_response(std::vector<double> ir,
                                   double direction_deg,
                                   std::string talker_id, int sample_rate,
                                   std::size_t ir_length = kDefaultRtfIrLength);
};

enum class GridTag { AhCoarse, AhFine, Individual };

std::string to_string(GridTag tag);
GridTag grid_tag_from_string(const std::string& s);

// Per-talker, per-direction RTF collection with a common direction grid.
class RtfSet {
 public:
  RtfSet() = default;
  RtfSet(GridTag tag, int sample_rate, std::size_t ir_length);

  void add(Rtf rtf);  // throws SchemaError on duplicate (talker, direction)

  const Rtf& entry(const std::string& talker, double direction_deg) const;
  bool contains(const std::string& talker, double direction_deg) const;
  bool has_talker(const std::string& talker) const;

  std::vector<std::string> talkers() const;
  const std::vector<double>& direction_grid() const { return grid_; }

  GridTag source_tag() const { return tag_; }
  int sample_rate() const { return sample_rate_; }
  std::size_t ir_length() const { return ir_length_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Checks that every talker covers the full grid and that metadata is
  // coherent; load/store call this.
  void validate() const;

 private:
  std::map<std::pair<std::string, double>, Rtf> entries_;
  std::vector<double> grid_;  // sorted unique directions
  GridTag tag_ = GridTag::Individual;
  int sample_rate_ = 0;
  std::size_t ir_length_ = kDefaultRtfIrLength;
};

// Estimates the RTF from a measured outer/inner impulse response pair via
// a Tikhonov-regularized cross-spectral ratio:
//   G(k) = S_i(k) conj(S_o(k)) / (|S_o(k)|^2 + eps),
// eps = eps_rel * max_k |S_o(k)|^2. The ratio is evaluated on an
// oversampled grid, transformed back, and truncated to ir_length taps.
Rtf compute_rtf(std::span<const double> ir_outer,
                std::span<const double> ir_inner, int sample_rate,
                double direction_deg = 0.0, std::string talker_id = "",
                double eps_rel = 1e-4,
                std::size_t ir_length = kDefaultRtfIrLength);

// Renders the IM view of a reference signal: linear convolution with the
// RTF impulse response, truncated to the input length.
AudioBuffer apply_rtf(const AudioBuffer& reference, const Rtf& rtf);

// Container format: a directory with index.json plus one float64 IR WAV
// per entry. Round-trips losslessly.
RtfSet load_rtf_set(const std::filesystem::path& dir);
void store_rtf_set(const RtfSet& set, const std::filesystem::path& dir);

// Uniform draw over the direction grid.
double select_direction(const RtfSet& set, Rng& rng);

enum class TalkerMode { NonIndividual, Individual };

// NonIndividual draws uniformly among talkers other than own_talker;
// Individual returns own_talker (which must be present).
std::string select_talker(const RtfSet& set, TalkerMode mode,
                          const std::string& own_talker, Rng& rng);

}  // namespace hearaug

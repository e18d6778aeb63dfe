// Python bindings for the main pipeline operations. Audio crosses the
// boundary as numpy float64 arrays (1-D mono, 2-D [channel, sample])
// plus an explicit sample rate; configuration crosses as keyword
// arguments with the same defaults as the C++ API.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hearaug/audio.hpp"
#include "hearaug/augment.hpp"
#include "hearaug/dataset.hpp"
#include "hearaug/errors.hpp"
#include "hearaug/eval.hpp"
#include "hearaug/fft.hpp"
#include "hearaug/fixtures.hpp"
#include "hearaug/mixing.hpp"
#include "hearaug/rng.hpp"
#include "hearaug/rtf.hpp"
#include "hearaug/stft.hpp"
#include "hearaug/stoi.hpp"
#include "hearaug/sweep.hpp"
#include "hearaug/version.hpp"
#include "hearaug/wav.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace hearaug;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray =
    py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

AudioBuffer buffer_from_array(const DoubleArray& arr, int sample_rate) {
  if (arr.ndim() == 1) {
    const auto* data = arr.data();
    return make_mono(std::vector<double>(data, data + arr.shape(0)),
                     sample_rate);
  }
  if (arr.ndim() == 2) {
    AudioBuffer buffer(static_cast<std::size_t>(arr.shape(0)),
                       static_cast<std::size_t>(arr.shape(1)), sample_rate);
    auto view = arr.unchecked<2>();
    for (py::ssize_t c = 0; c < arr.shape(0); ++c)
      for (py::ssize_t i = 0; i < arr.shape(1); ++i)
        buffer.samples[static_cast<std::size_t>(c)]
                      [static_cast<std::size_t>(i)] = view(c, i);
    return buffer;
  }
  throw InvalidArgument("audio arrays must be 1-D or 2-D [channel, sample]");
}

py::array_t<double> array_from_vector(const std::vector<double>& x) {
  return py::array_t<double>({static_cast<py::ssize_t>(x.size())}, x.data());
}

// Mono buffers come back 1-D, anything else [channel, sample].
py::array_t<double> array_from_buffer(const AudioBuffer& buffer) {
  if (buffer.num_channels() == 1) return array_from_vector(buffer.channel(0));
  py::array_t<double> out({static_cast<py::ssize_t>(buffer.num_channels()),
                           static_cast<py::ssize_t>(buffer.num_samples())});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t c = 0; c < buffer.num_channels(); ++c)
    for (std::size_t i = 0; i < buffer.num_samples(); ++i)
      view(static_cast<py::ssize_t>(c), static_cast<py::ssize_t>(i)) =
          buffer.samples[c][i];
  return out;
}

std::vector<double> vector_from_array(const DoubleArray& arr) {
  if (arr.ndim() != 1)
    throw InvalidArgument("expected a 1-D array");
  const auto* data = arr.data();
  return std::vector<double>(data, data + arr.shape(0));
}

py::array_t<std::complex<double>> spectrogram_channel_to_array(
    const Spectrogram& spec, std::size_t channel) {
  py::array_t<std::complex<double>> out(
      {static_cast<py::ssize_t>(spec.num_frames()),
       static_cast<py::ssize_t>(spec.num_bins())});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t f = 0; f < spec.num_frames(); ++f)
    for (std::size_t k = 0; k < spec.num_bins(); ++k)
      view(static_cast<py::ssize_t>(f), static_cast<py::ssize_t>(k)) =
          spec.at(channel, f, k);
  return out;
}

py::array_t<std::complex<double>> mask_to_array(
    const std::vector<std::complex<double>>& flat, std::size_t frames,
    std::size_t bins) {
  py::array_t<std::complex<double>> out(
      {static_cast<py::ssize_t>(frames), static_cast<py::ssize_t>(bins)});
  std::copy(flat.begin(), flat.end(), out.mutable_data());
  return out;
}

WavDepth depth_from_string(const std::string& s) {
  if (s == "i16") return WavDepth::Int16;
  if (s == "i24") return WavDepth::Int24;
  if (s == "i32") return WavDepth::Int32;
  if (s == "f32") return WavDepth::Float32;
  if (s == "f64") return WavDepth::Float64;
  throw InvalidArgument("unknown WAV depth '" + s +
                        "' (expected i16, i24, i32, f32, f64)");
}

py::dict provenance_to_dict(const NoiseProvenance& p) {
  py::object decorrelation = py::none();
  if (!(std::isinf(p.decorrelation_db) && p.decorrelation_db < 0.0))
    decorrelation = py::float_(p.decorrelation_db);
  return py::dict(
      "method"_a = to_string(p.method), "mode"_a = to_string(p.mode),
      "rtf_talker"_a = p.rtf_talker, "directions_deg"_a = p.directions_deg,
      "decorrelation_db"_a = decorrelation,
      "diffuse_delay_s"_a = p.diffuse_delay_s,
      "shift_samples"_a = p.shift_samples,
      "wrapped_shifts"_a = p.wrapped_shifts, "zero_im"_a = p.zero_im);
}

AugmentationPolicy policy_from_kwargs(const std::string& method,
                                      const std::string& mode,
                                      double p_single, double p_off,
                                      double decorr_min_db,
                                      double decorr_max_db,
                                      double diffuse_delay_s, uint64_t seed) {
  AugmentationPolicy policy;
  policy.method = augment_method_from_string(method);
  policy.source_mode = source_mode_from_string(mode);
  policy.p_single = p_single;
  policy.decorrelation = {p_off, decorr_min_db, decorr_max_db};
  policy.diffuse_delay_s = diffuse_delay_s;
  policy.master_seed = seed;
  policy.validate();
  return policy;
}

py::dict stats_to_dict(const NormStats& s) {
  return py::dict("mean"_a = s.mean, "std"_a = s.std,
                  "eps_guarded"_a = s.eps_guarded);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-microphone hearable noise augmentation toolkit";
  m.attr("__version__") = kVersion;
  m.attr("PIPELINE_SAMPLE_RATE") = kPipelineSampleRate;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());

  // --- WAV I/O
  m.def(
      "load_wav",
      [](const std::string& path) {
        const auto buffer = load_wav(path);
        return py::make_tuple(array_from_buffer(buffer), buffer.sample_rate);
      },
      "path"_a, "Read a WAV file; returns (samples, sample_rate).");
  m.def(
      "save_wav",
      [](const DoubleArray& samples, int sample_rate, const std::string& path,
         const std::string& depth) {
        save_wav(buffer_from_array(samples, sample_rate), path,
                 depth_from_string(depth));
      },
      "samples"_a, "sample_rate"_a, "path"_a, "depth"_a = "f32",
      "Write samples as a WAV file (depth: i16, i24, i32, f32, f64).");

  // --- STFT
  m.def(
      "stft",
      [](const DoubleArray& x, int sample_rate, int frame_size,
         int hop_size) {
        StftConfig config{frame_size, hop_size};
        const auto spec = stft(buffer_from_array(x, sample_rate), config);
        if (spec.num_channels() != 1)
          throw InvalidArgument("stft binding expects mono input");
        return spectrogram_channel_to_array(spec, 0);
      },
      "x"_a, "sample_rate"_a, "frame_size"_a = 512, "hop_size"_a = 256,
      "Windowed one-sided STFT; returns complex [frames, bins].");
  m.def(
      "istft",
      [](const ComplexArray& spec_array, int sample_rate,
         std::size_t source_length, int frame_size, int hop_size) {
        if (spec_array.ndim() != 2)
          throw InvalidArgument("spectrogram must be 2-D [frames, bins]");
        StftConfig config{frame_size, hop_size};
        const auto frames = static_cast<std::size_t>(spec_array.shape(0));
        const auto bins = static_cast<std::size_t>(spec_array.shape(1));
        if (bins != config.num_bins())
          throw InvalidArgument("spectrogram bin count does not match "
                                "frame_size/2 + 1");
        Spectrogram spec(1, frames, config, sample_rate, source_length);
        auto view = spec_array.unchecked<2>();
        for (std::size_t f = 0; f < frames; ++f)
          for (std::size_t k = 0; k < bins; ++k)
            spec.at(0, f, k) = view(static_cast<py::ssize_t>(f),
                                    static_cast<py::ssize_t>(k));
        return array_from_buffer(istft(spec));
      },
      "spec"_a, "sample_rate"_a, "source_length"_a, "frame_size"_a = 512,
      "hop_size"_a = 256,
      "Overlap-add inverse STFT back to source_length samples.");

  // --- Sweep measurement
  m.def(
      "generate_sweep",
      [](double f_start, double f_end, double duration, int sample_rate,
         double amplitude) {
        SweepSpec spec{f_start, f_end, duration, sample_rate, amplitude};
        const auto signals = generate_sweep(spec);
        return py::make_tuple(array_from_buffer(signals.sweep),
                              array_from_buffer(signals.inverse_filter));
      },
      "f_start"_a = 80.0, "f_end"_a = 22050.0, "duration"_a = 3.0,
      "sample_rate"_a = 44100, "amplitude"_a = 0.9,
      "Exponential sine sweep and its inverse filter.");
  m.def(
      "deconvolve_ir",
      [](const DoubleArray& recording, int sample_rate, std::size_t ir_length,
         double f_start, double f_end, double duration, double amplitude) {
        SweepSpec spec{f_start, f_end, duration, sample_rate, amplitude};
        return array_from_vector(deconvolve_ir(
            buffer_from_array(recording, sample_rate), spec, ir_length));
      },
      "recording"_a, "sample_rate"_a, "ir_length"_a, "f_start"_a = 80.0,
      "f_end"_a = 22050.0, "duration"_a = 3.0, "amplitude"_a = 0.9,
      "Impulse response of a system recorded while the sweep was played.");

  // --- Relative transfer functions
  m.def(
      "compute_rtf",
      [](const DoubleArray& ir_outer, const DoubleArray& ir_inner,
         int sample_rate, double direction_deg, const std::string& talker_id,
         double eps_rel, std::size_t ir_length) {
        const auto rtf =
            compute_rtf(vector_from_array(ir_outer),
                        vector_from_array(ir_inner), sample_rate,
                        direction_deg, talker_id, eps_rel, ir_length);
        return py::dict(
            "impulse_response"_a = array_from_vector(rtf.impulse_response),
            "freq_response"_a = rtf.freq_response,
            "direction_deg"_a = rtf.direction_deg,
            "talker_id"_a = rtf.talker_id,
            "sample_rate"_a = rtf.sample_rate);
      },
      "ir_outer"_a, "ir_inner"_a, "sample_rate"_a, "direction_deg"_a = 0.0,
      "talker_id"_a = "", "eps_rel"_a = 1e-4,
      "ir_length"_a = kDefaultRtfIrLength,
      "Regularized outer-to-inner relative transfer function.");
  m.def(
      "apply_rtf",
      [](const DoubleArray& x, int sample_rate, const DoubleArray& rtf_ir) {
        auto ir = vector_from_array(rtf_ir);
        const auto padded = fft::next_pow2(std::max<std::size_t>(ir.size(), 1));
        const auto rtf = Rtf::from_impulse_response(std::move(ir), 0.0, "",
                                                    sample_rate, padded);
        return array_from_buffer(
            apply_rtf(buffer_from_array(x, sample_rate), rtf));
      },
      "x"_a, "sample_rate"_a, "rtf_ir"_a,
      "Render the inner-microphone view of a signal through an RTF.");

  // --- Noise augmentation
  m.def(
      "augment_noise",
      [](const DoubleArray& reference, int sample_rate,
         const std::optional<std::string>& rtf_set_dir,
         const std::string& method, const std::string& own_talker,
         const std::string& mode, uint64_t seed, double p_single,
         double p_off, double decorr_min_db, double decorr_max_db,
         double diffuse_delay_s) {
        const auto policy =
            policy_from_kwargs(method, mode, p_single, p_off, decorr_min_db,
                               decorr_max_db, diffuse_delay_s, seed);
        std::optional<RtfSet> set;
        const RtfSet* set_ptr = nullptr;
        if (rtf_set_dir.has_value()) {
          set = load_rtf_set(*rtf_set_dir);
          set_ptr = &*set;
        }
        Rng rng(seed);
        const auto pair = augment(buffer_from_array(reference, sample_rate),
                                  policy, set_ptr, own_talker, rng);
        return py::make_tuple(array_from_buffer(pair.om),
                              array_from_buffer(pair.im),
                              provenance_to_dict(pair.provenance));
      },
      "reference"_a, "sample_rate"_a, "rtf_set_dir"_a = py::none(),
      "method"_a = "individual", "own_talker"_a = "", "mode"_a = "random",
      "seed"_a = 0, "p_single"_a = 0.5, "p_off"_a = 0.1,
      "decorr_min_db"_a = -100.0, "decorr_max_db"_a = -60.0,
      "diffuse_delay_s"_a = 1.0,
      "Render a two-channel (OM, IM) noise pair; returns (om, im, info).");
  m.def(
      "add_decorrelation_noise",
      [](const DoubleArray& im, int sample_rate, double level_db,
         uint64_t seed) {
        Rng rng(seed);
        return array_from_buffer(add_decorrelation_noise(
            buffer_from_array(im, sample_rate), level_db, rng));
      },
      "im"_a, "sample_rate"_a, "level_db"_a, "seed"_a,
      "Add white noise at an exact energy ratio below the input.");

  // --- Mixing
  m.def(
      "mix",
      [](const DoubleArray& s_om, const DoubleArray& s_im,
         const std::optional<DoubleArray>& body_im, const DoubleArray& n_om,
         const DoubleArray& n_im, int sample_rate, double snr_db) {
        SpeechPair speech;
        speech.s_om = buffer_from_array(s_om, sample_rate);
        speech.s_im = buffer_from_array(s_im, sample_rate);
        if (body_im.has_value())
          speech.body_im = buffer_from_array(*body_im, sample_rate);
        NoisePair noise;
        noise.om = buffer_from_array(n_om, sample_rate);
        noise.im = buffer_from_array(n_im, sample_rate);
        const auto result = mix(speech, noise, snr_db);
        return py::dict(
            "y_om"_a = array_from_buffer(result.y_om),
            "y_im"_a = array_from_buffer(result.y_im),
            "target"_a = array_from_buffer(result.target),
            "raw_y_om"_a = array_from_buffer(result.raw_y_om),
            "raw_y_im"_a = array_from_buffer(result.raw_y_im),
            "noise_gain"_a = result.noise_gain,
            "om_stats"_a = stats_to_dict(result.om_stats),
            "im_stats"_a = stats_to_dict(result.im_stats),
            "snr_db_requested"_a = result.snr_db_requested,
            "snr_db_achieved"_a = result.snr_db_achieved,
            "snr_out_of_range"_a = result.snr_out_of_range);
      },
      "s_om"_a, "s_im"_a, "body_im"_a = py::none(), "n_om"_a, "n_im"_a,
      "sample_rate"_a = kPipelineSampleRate, "snr_db"_a,
      "Compose normalized noisy OM/IM channels at a target SNR.");

  // --- Metrics
  m.def(
      "stoi",
      [](const DoubleArray& clean, const DoubleArray& degraded,
         int sample_rate) {
        return stoi(buffer_from_array(clean, sample_rate),
                    buffer_from_array(degraded, sample_rate));
      },
      "clean"_a, "degraded"_a, "sample_rate"_a = kPipelineSampleRate,
      "Short-time objective intelligibility (16 kHz inputs).");
  m.def(
      "msc",
      [](const DoubleArray& x, const DoubleArray& y, int sample_rate,
         int segment_size, int hop_size) {
        WelchConfig config{segment_size, hop_size};
        return array_from_vector(msc(buffer_from_array(x, sample_rate),
                                     buffer_from_array(y, sample_rate),
                                     config));
      },
      "x"_a, "y"_a, "sample_rate"_a = kPipelineSampleRate,
      "segment_size"_a = 256, "hop_size"_a = 128,
      "Magnitude-squared coherence per frequency bin.");
  m.def(
      "mean_msc",
      [](const DoubleArray& x, const DoubleArray& y, int sample_rate,
         int segment_size, int hop_size) {
        WelchConfig config{segment_size, hop_size};
        return mean_msc(buffer_from_array(x, sample_rate),
                        buffer_from_array(y, sample_rate), config);
      },
      "x"_a, "y"_a, "sample_rate"_a = kPipelineSampleRate,
      "segment_size"_a = 256, "hop_size"_a = 128,
      "Mean magnitude-squared coherence across bins.");
  m.def(
      "oracle_masks",
      [](const DoubleArray& clean_om, const DoubleArray& noisy_om,
         const DoubleArray& noisy_im, int sample_rate,
         const std::string& variant, double clip) {
        const auto masks = oracle_masks(
            buffer_from_array(clean_om, sample_rate),
            buffer_from_array(noisy_om, sample_rate),
            buffer_from_array(noisy_im, sample_rate),
            mask_variant_from_string(variant), clip);
        return py::make_tuple(
            mask_to_array(masks.m_om, masks.frames, masks.bins),
            mask_to_array(masks.m_im, masks.frames, masks.bins));
      },
      "clean_om"_a, "noisy_om"_a, "noisy_im"_a,
      "sample_rate"_a = kPipelineSampleRate, "variant"_a = "om",
      "clip"_a = kDefaultMaskClip,
      "Oracle masks for a variant; returns (m_om, m_im) [frames, bins].");
  m.def(
      "apply_oracle_masks",
      [](const DoubleArray& clean_om, const DoubleArray& noisy_om,
         const DoubleArray& noisy_im, int sample_rate,
         const std::string& variant, double clip) {
        const auto om = buffer_from_array(noisy_om, sample_rate);
        const auto im = buffer_from_array(noisy_im, sample_rate);
        const auto masks =
            oracle_masks(buffer_from_array(clean_om, sample_rate), om, im,
                         mask_variant_from_string(variant), clip);
        return array_from_buffer(apply_masks(masks, om, im));
      },
      "clean_om"_a, "noisy_om"_a, "noisy_im"_a,
      "sample_rate"_a = kPipelineSampleRate, "variant"_a = "om",
      "clip"_a = kDefaultMaskClip,
      "Oracle-masked estimate back in the time domain.");
  m.def(
      "combined_l1_loss",
      [](const DoubleArray& estimate, const DoubleArray& target,
         int sample_rate, double stft_weight) {
        return combined_l1_loss(buffer_from_array(estimate, sample_rate),
                                buffer_from_array(target, sample_rate),
                                stft_weight);
      },
      "estimate"_a, "target"_a, "sample_rate"_a = kPipelineSampleRate,
      "stft_weight"_a = 1.0,
      "Mean time-domain |error| plus weighted mean STFT |error|.");
  m.def(
      "snr_db",
      [](const DoubleArray& clean, const DoubleArray& degraded,
         int sample_rate) {
        return snr_db(buffer_from_array(clean, sample_rate),
                      buffer_from_array(degraded, sample_rate));
      },
      "clean"_a, "degraded"_a, "sample_rate"_a = kPipelineSampleRate,
      "Signal-to-residual ratio in dB.");

  // --- Dataset generation
  m.def(
      "generate_dataset",
      [](const std::string& corpus_index, const std::string& out_dir,
         std::size_t n_mixtures, uint64_t seed, const std::string& method,
         const std::string& mode, double snr_min_db, double snr_max_db,
         std::size_t workers, double p_single, double p_off,
         double decorr_min_db, double decorr_max_db, double diffuse_delay_s,
         std::size_t train_count, std::size_t val_count,
         std::size_t test_count) {
        const auto policy =
            policy_from_kwargs(method, mode, p_single, p_off, decorr_min_db,
                               decorr_max_db, diffuse_delay_s, seed);
        SplitConfig split_config;
        split_config.train_count = train_count;
        split_config.val_count = val_count;
        split_config.test_count = test_count;
        const auto index = CorpusIndex::load(corpus_index);
        auto manifest = plan(index, policy, split_config, snr_min_db,
                             snr_max_db, n_mixtures, seed);
        GenerateReport report;
        {
          py::gil_scoped_release release;
          report = generate(std::move(manifest), out_dir, workers);
        }
        return py::dict("n_ok"_a = report.n_ok,
                        "n_failed"_a = report.n_failed,
                        "failed_records"_a = report.failed_records,
                        "manifest"_a = report.manifest_path.string());
      },
      "corpus_index"_a, "out_dir"_a, "n_mixtures"_a, "seed"_a,
      "method"_a = "individual", "mode"_a = "random",
      "snr_min_db"_a = kSnrRangeMinDb, "snr_max_db"_a = kSnrRangeMaxDb,
      "workers"_a = 1, "p_single"_a = 0.5, "p_off"_a = 0.1,
      "decorr_min_db"_a = -100.0, "decorr_max_db"_a = -60.0,
      "diffuse_delay_s"_a = 1.0, "train_count"_a = 12, "val_count"_a = 2,
      "test_count"_a = 4,
      "Plan and render a dataset; returns a generation report.");
  m.def(
      "regenerate_dataset",
      [](const std::string& manifest_path, const std::string& out_dir,
         std::size_t workers) {
        auto manifest = DatasetManifest::load(manifest_path);
        GenerateReport report;
        {
          py::gil_scoped_release release;
          report = generate(std::move(manifest), out_dir, workers);
        }
        return py::dict("n_ok"_a = report.n_ok,
                        "n_failed"_a = report.n_failed,
                        "failed_records"_a = report.failed_records,
                        "manifest"_a = report.manifest_path.string());
      },
      "manifest"_a, "out_dir"_a, "workers"_a = 1,
      "Re-render a dataset from an existing manifest.");
  m.def(
      "audio_checksum",
      [](const DoubleArray& x) { return audio_checksum(vector_from_array(x)); },
      "x"_a, "Order-stable checksum of audio at 24-bit resolution.");

  // --- Fixtures
  m.def(
      "write_fixture_corpus",
      [](const std::string& out_dir, uint64_t seed, std::size_t n_talkers,
         std::size_t n_utterances_per_talker, std::size_t n_noise,
         double speech_duration_s, double noise_duration_s,
         std::size_t n_directions, std::size_t n_fine_directions) {
        FixtureSpec spec;
        spec.seed = seed;
        spec.n_talkers = n_talkers;
        spec.n_utterances_per_talker = n_utterances_per_talker;
        spec.n_noise = n_noise;
        spec.speech_duration_s = speech_duration_s;
        spec.noise_duration_s = noise_duration_s;
        spec.n_directions = n_directions;
        spec.n_fine_directions = n_fine_directions;
        py::gil_scoped_release release;
        return write_fixture_corpus(out_dir, spec).string();
      },
      "out_dir"_a, "seed"_a, "n_talkers"_a = 4,
      "n_utterances_per_talker"_a = 3, "n_noise"_a = 6,
      "speech_duration_s"_a = 5.0, "noise_duration_s"_a = 12.0,
      "n_directions"_a = 8, "n_fine_directions"_a = 48,
      "Write a synthetic corpus; returns the index path.");
}

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "doctest.h"
#include "hearaug/errors.hpp"
#include "hearaug/eval.hpp"
#include "hearaug/fixtures.hpp"
#include "hearaug/mixing.hpp"
#include "hearaug/stft.hpp"
#include "hearaug/stoi.hpp"
#include "test_util.hpp"

using namespace hearaug;

namespace {

// Mixes two independent white signals so the true coherence is the flat
// value a^2 / (a^2 + b^2).
std::pair<AudioBuffer, AudioBuffer> coherent_pair(double a, double b,
                                                  std::size_t n,
                                                  uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double common = rng.gaussian();
    x[i] = common;
    y[i] = a * common + b * rng.gaussian();
  }
  return {make_mono(std::move(x), 16000), make_mono(std::move(y), 16000)};
}

AudioBuffer speech_fixture(double seconds, uint64_t seed) {
  Rng rng(seed);
  return make_mono(speech_like(seconds, 16000, rng), 16000);
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("coherence of a signal with itself is one") {
  auto x = testutil::white_buffer(32768, 1);
  auto bins = msc(x, x);
  REQUIRE(bins.size() == 129);
  for (double v : bins) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mean_msc(x, x) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("coherence of independent signals is near zero") {
  auto x = testutil::white_buffer(1 << 17, 2);
  auto y = testutil::white_buffer(1 << 17, 3);
  CHECK(mean_msc(x, y) < 0.05);
}

TEST_CASE("welch estimate recovers a known flat coherence") {
  for (double target : {0.2, 0.5, 0.9}) {
    CAPTURE(target);
    const double a = std::sqrt(target);
    const double b = std::sqrt(1.0 - target);
    auto [x, y] = coherent_pair(a, b, 1 << 17, 4);
    CHECK(mean_msc(x, y) == doctest::Approx(target).epsilon(0.05));
  }
}

TEST_CASE("coherence input validation") {
  auto x = testutil::white_buffer(300, 5);
  auto y = testutil::white_buffer(301, 6);
  CHECK_THROWS_AS(msc(x, y), InvalidArgument);

  auto fast = testutil::white_buffer(300, 7, 44100);
  CHECK_THROWS_AS(msc(x, fast), InvalidArgument);

  auto tiny = testutil::white_buffer(100, 8);
  auto tiny2 = testutil::white_buffer(100, 9);
  CHECK_THROWS_AS(msc(tiny, tiny2), InvalidArgument);
}

TEST_CASE("identity mixture gives a unit OM mask") {
  auto clean = speech_fixture(2.0, 10);
  auto masks = oracle_masks(clean, clean, clean, MaskVariant::Om);
  for (std::size_t f = 0; f < masks.frames; f += 7) {
    for (std::size_t k = 0; k < masks.bins; k += 17) {
      // Bins with signal carry a mask of one; empty bins stay zero.
      auto m = masks.om(f, k);
      CHECK((std::abs(m) < 1e-9 ||
             std::abs(m - std::complex<double>{1.0, 0.0}) < 1e-9));
    }
  }
  CHECK(masks.variant == MaskVariant::Om);
  for (std::size_t f = 0; f < masks.frames; ++f)
    for (std::size_t k = 0; k < masks.bins; ++k)
      CHECK(masks.im(f, k) == std::complex<double>{0.0, 0.0});

  auto restored = apply_masks(masks, clean, clean);
  CHECK(testutil::relative_l2(mono_view(clean), mono_view(restored)) <
        1e-10);
}

TEST_CASE("unclipped two-channel masks solve the least-squares system") {
  auto clean = speech_fixture(2.0, 11);
  auto n_om = testutil::white_buffer(32000, 12, 16000, 0.1);
  auto n_im = testutil::white_buffer(32000, 13, 16000, 0.08);
  AudioBuffer y_om(1, 32000, 16000), y_im(1, 32000, 16000);
  for (std::size_t i = 0; i < 32000; ++i) {
    y_om.channel(0)[i] = clean.channel(0)[i] + n_om.channel(0)[i];
    y_im.channel(0)[i] = 0.7 * clean.channel(0)[i] + n_im.channel(0)[i];
  }

  const double huge_clip = 1e9;  // effectively unclipped
  auto masks =
      oracle_masks(clean, y_om, y_im, MaskVariant::OmIm, huge_clip);

  auto spec_s = stft(clean);
  auto spec_o = stft(y_om);
  auto spec_i = stft(y_im);
  double worst = 0.0;
  double worst_minnorm = 0.0;
  for (std::size_t f = 0; f < masks.frames; ++f) {
    for (std::size_t k = 0; k < masks.bins; ++k) {
      const auto s = spec_s.at(0, f, k);
      const auto yo = spec_o.at(0, f, k);
      const auto yi = spec_i.at(0, f, k);
      const double denom = std::norm(yo) + std::norm(yi);
      if (denom < 1e-18) continue;
      // The masks reconstruct S exactly ...
      const auto recon = masks.om(f, k) * yo + masks.im(f, k) * yi;
      worst = std::max(worst, std::abs(recon - s));
      // ... with the minimum-norm solution S * conj(Y_m) / (|Yo|^2+|Yi|^2).
      const auto expect_om = s * std::conj(yo) / denom;
      const auto expect_im = s * std::conj(yi) / denom;
      worst_minnorm =
          std::max({worst_minnorm, std::abs(masks.om(f, k) - expect_om),
                    std::abs(masks.im(f, k) - expect_im)});
    }
  }
  CHECK(worst < 1e-9);
  CHECK(worst_minnorm < 1e-9);

  // Applying them returns the clean signal almost exactly.
  auto restored = apply_masks(masks, y_om, y_im);
  CHECK(snr_db(clean, restored) > 60.0);
}

TEST_CASE("mask magnitudes are clipped with phase preserved") {
  auto clean = speech_fixture(1.0, 14);
  // Tiny noisy channel forces |S/Y| far above the clip.
  AudioBuffer y_om(1, 16000, 16000), y_im(1, 16000, 16000);
  for (std::size_t i = 0; i < 16000; ++i) {
    y_om.channel(0)[i] = 1e-4 * clean.channel(0)[i];
    y_im.channel(0)[i] = 0.0;
  }
  auto masks = oracle_masks(clean, y_om, y_im, MaskVariant::Om, 5.0);
  auto unclipped = oracle_masks(clean, y_om, y_im, MaskVariant::Om, 1e12);
  bool saw_clip = false;
  for (std::size_t f = 0; f < masks.frames; ++f) {
    for (std::size_t k = 0; k < masks.bins; ++k) {
      const auto m = masks.om(f, k);
      CHECK(std::abs(m) <= 5.0 + 1e-9);
      const auto u = unclipped.om(f, k);
      if (std::abs(u) > 5.0 + 1e-6) {
        saw_clip = true;
        // Same phase, magnitude pinned to the clip.
        CHECK(std::abs(m) == doctest::Approx(5.0).epsilon(1e-9));
        if (std::abs(u) > 0 && std::abs(m) > 0) {
          auto phase_diff = std::arg(m) - std::arg(u);
          CHECK(std::abs(std::sin(phase_diff)) < 1e-9);
        }
      }
    }
  }
  CHECK(saw_clip);
}

TEST_CASE("single-channel variants leave the other mask empty") {
  auto clean = speech_fixture(1.0, 15);
  auto y = testutil::white_buffer(16000, 16);
  auto om_only = oracle_masks(clean, y, y, MaskVariant::Om);
  for (const auto& m : om_only.m_im) CHECK(m == std::complex<double>{});
  auto im_only = oracle_masks(clean, y, y, MaskVariant::Im);
  for (const auto& m : im_only.m_om) CHECK(m == std::complex<double>{});
}

TEST_CASE("mask variant names round trip") {
  for (MaskVariant v : {MaskVariant::Om, MaskVariant::Im,
                        MaskVariant::OmAuxIm, MaskVariant::OmIm}) {
    CHECK(mask_variant_from_string(to_string(v)) == v);
  }
  CHECK_THROWS_AS(mask_variant_from_string("nope"), InvalidArgument);
}

TEST_CASE("combined loss vanishes only at equality") {
  auto x = speech_fixture(1.0, 17);
  CHECK(combined_l1_loss(x, x) == 0.0);

  auto y = x;
  y.channel(0)[5000] += 0.01;
  CHECK(combined_l1_loss(y, x) > 0.0);
}

TEST_CASE("with zero STFT weight the loss is the time-domain L1") {
  auto x = testutil::white_buffer(4000, 18);
  auto y = x;
  double expected = 0.0;
  Rng rng(19);
  for (std::size_t i = 0; i < 4000; ++i) {
    const double d = 0.01 * (2.0 * rng.uniform() - 1.0);
    y.channel(0)[i] += d;
    expected += std::abs(y.channel(0)[i] - x.channel(0)[i]);
  }
  expected /= 4000.0;
  CHECK(combined_l1_loss(y, x, 0.0) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("snr_db matches its construction") {
  auto clean = testutil::white_buffer(8000, 20);
  auto noise = testutil::white_buffer(8000, 21, 16000, 0.05);
  AudioBuffer degraded(1, 8000, 16000);
  for (std::size_t i = 0; i < 8000; ++i)
    degraded.channel(0)[i] = clean.channel(0)[i] + noise.channel(0)[i];

  const double expected =
      10.0 * std::log10(testutil::energy(mono_view(clean)) /
                        testutil::energy(mono_view(noise)));
  CHECK(snr_db(clean, degraded) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(snr_db(clean, clean) ==
        std::numeric_limits<double>::infinity());
}

TEST_CASE("stoi is near one for identical signals") {
  auto x = speech_fixture(3.0, 22);
  CHECK(stoi(x, x) >= 0.99);
}

TEST_CASE("stoi falls with added noise") {
  auto x = speech_fixture(3.0, 23);
  auto mk_noisy = [&](double snr) {
    auto n = testutil::white_buffer(x.num_samples(), 24);
    SpeechPair sp;
    sp.s_om = x;
    sp.s_im = x;
    sp.talker_id = "t";
    NoisePair np;
    np.om = n;
    np.im = n;
    auto r = mix(sp, np, snr);
    return stoi(x, r.raw_y_om);
  };
  const double clean_side = mk_noisy(20.0);
  const double noisy_side = mk_noisy(-10.0);
  CHECK(clean_side > 0.8);
  CHECK(clean_side > noisy_side + 0.1);
}

TEST_CASE("stoi rejects mismatched input") {
  auto x = speech_fixture(1.0, 25);
  auto y = testutil::white_buffer(x.num_samples() - 1, 26);
  CHECK_THROWS_AS(stoi(x, y), InvalidArgument);

  auto wrong_rate = testutil::white_buffer(44100, 27, 44100);
  CHECK_THROWS_AS(stoi(wrong_rate, wrong_rate), InvalidArgument);
}

TEST_CASE("the 10 kHz resampler preserves a tone") {
  // 1 kHz tone, 16 kHz in, 10 kHz out: the tone must survive at the same
  // frequency with near-unit amplitude.
  const std::size_t n = 16000;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * std::numbers::pi * 1000.0 * i / 16000.0);
  auto y = stoi_resample_to_10k(x);
  REQUIRE(std::llabs(static_cast<long long>(y.size()) - 10000) <= 8);

  // Goertzel-style projection at 1 kHz, 10 kHz rate, interior window.
  const std::size_t lo = 1000, hi = y.size() - 1000;
  double re = 0.0, im = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double phase = 2.0 * std::numbers::pi * 1000.0 *
                         static_cast<double>(i) / 10000.0;
    re += y[i] * std::cos(phase);
    im += y[i] * std::sin(phase);
  }
  const double amp = 2.0 * std::hypot(re, im) / static_cast<double>(hi - lo);
  CHECK(amp == doctest::Approx(1.0).epsilon(0.02));

  // Energy above the passband edge is tiny: total energy matches a pure
  // unit sine within a percent.
  const double e = testutil::energy(std::span(y).subspan(lo, hi - lo));
  CHECK(e / static_cast<double>(hi - lo) ==
        doctest::Approx(0.5).epsilon(0.02));
}

}  // TEST_SUITE("eval")

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "hearaug/augment.hpp"
#include "hearaug/errors.hpp"
#include "hearaug/eval.hpp"
#include "hearaug/fixtures.hpp"
#include "test_util.hpp"

using namespace hearaug;

namespace {

RtfSet small_set(std::size_t n_directions = 4) {
  return make_fixture_rtf_set(GridTag::Individual, {"t01", "t02", "t03"},
                              n_directions, 16000, 512, 7);
}

AugmentationPolicy policy_for(AugmentMethod method,
                              SourceMode mode = SourceMode::SingleSource) {
  AugmentationPolicy p;
  p.method = method;
  p.source_mode = mode;
  return p;
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("single-source OM channel is the reference itself") {
  auto ref = testutil::white_buffer(8000, 1);
  RtfSet set = small_set();
  Rng rng(5);
  auto pair = augment(ref, policy_for(AugmentMethod::Individual), &set,
                      "t02", rng);
  CHECK(testutil::bit_identical(mono_view(ref), mono_view(pair.om)));
  CHECK(pair.im.num_samples() == ref.num_samples());
  CHECK(pair.provenance.rtf_talker == "t02");
  CHECK(pair.provenance.mode == SourceMode::SingleSource);
  REQUIRE(pair.provenance.directions_deg.size() == 1);
}

TEST_CASE("no-IM-noise renders a bit-exact OM copy and a zero IM") {
  auto ref = testutil::white_buffer(16000, 2);
  Rng rng(3);
  auto pair = augment(ref, policy_for(AugmentMethod::NoImNoise), nullptr,
                      "t01", rng);
  CHECK(testutil::bit_identical(mono_view(ref), mono_view(pair.om)));
  for (double v : mono_view(pair.im)) CHECK(v == 0.0);
  CHECK(pair.provenance.rtf_talker.empty());
  CHECK(pair.provenance.decorrelation_db == kNoDecorrelation);
}

TEST_CASE("no-IM-noise never goes diffuse and spends no draws") {
  auto ref = testutil::white_buffer(4000, 3);
  auto policy = policy_for(AugmentMethod::NoImNoise,
                           SourceMode::RandomEachRecord);
  Rng rng(17);
  auto pair = augment(ref, policy, nullptr, "", rng);
  CHECK(pair.provenance.mode == SourceMode::SingleSource);
  // The record consumed nothing from the stream.
  Rng fresh(17);
  CHECK(rng.next_u64() == fresh.next_u64());
}

TEST_CASE("IM channel is the RTF render of the reference") {
  auto ref = testutil::white_buffer(6000, 4);
  RtfSet set = small_set();
  Rng rng(6);
  // Disable decorrelation so the IM view is the bare render.
  auto pair = render_single_source(ref, &set, AugmentMethod::Individual,
                                   "t01", set.direction_grid()[2],
                                   kNoDecorrelation, rng);
  auto direct = apply_rtf(ref, set.entry("t01", set.direction_grid()[2]));
  CHECK(testutil::bit_identical(mono_view(pair.im), mono_view(direct)));
}

TEST_CASE("diffuse render equals the brute-force shifted sum") {
  const double delay_s = 0.25;
  RtfSet set = small_set(4);
  // Long enough that no shift wraps: 3 shifts * 0.25 s < 2 s.
  auto ref = testutil::white_buffer(32000, 8);
  Rng rng(9);
  auto pair = render_diffuse(ref, &set, AugmentMethod::Individual, "t03",
                             kNoDecorrelation, delay_s, rng);

  const auto& grid = set.direction_grid();
  const std::size_t n = ref.num_samples();
  std::vector<double> om_sum(n, 0.0), im_sum(n, 0.0);
  for (std::size_t d = 0; d < grid.size(); ++d) {
    const auto shift = static_cast<std::size_t>(std::llround(
        static_cast<double>(d) * delay_s * ref.sample_rate));
    auto shifted = circular_shift(mono_view(ref), shift);
    auto rendered = apply_rtf(make_mono(shifted, 16000),
                              set.entry("t03", grid[d]));
    for (std::size_t i = 0; i < n; ++i) {
      om_sum[i] += shifted[i];
      im_sum[i] += rendered.channel(0)[i];
    }
  }

  CHECK(testutil::bit_identical(mono_view(pair.om), om_sum));
  CHECK(testutil::bit_identical(mono_view(pair.im), im_sum));
  CHECK_FALSE(pair.provenance.wrapped_shifts);
  REQUIRE(pair.provenance.shift_samples.size() == 4);
  CHECK(pair.provenance.shift_samples[0] == 0);
  CHECK(pair.provenance.shift_samples[3] == 12000);
  CHECK(pair.provenance.directions_deg == grid);
}

TEST_CASE("short references flag wrapped shifts") {
  RtfSet set = small_set(4);
  auto ref = testutil::white_buffer(8000, 10);  // 0.5 s < 4 * 0.25 s
  Rng rng(11);
  auto pair = render_diffuse(ref, &set, AugmentMethod::Individual, "t01",
                             kNoDecorrelation, 0.25, rng);
  CHECK(pair.provenance.wrapped_shifts);
}

TEST_CASE("circular shift wraps exactly") {
  std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  auto y = circular_shift(x, 2);
  CHECK(y == std::vector<double>{4.0, 5.0, 1.0, 2.0, 3.0});
  auto z = circular_shift(x, 7);  // shift >= length wraps modulo
  CHECK(z == std::vector<double>{4.0, 5.0, 1.0, 2.0, 3.0});
  auto w = circular_shift(x, 0);
  CHECK(w == x);
}

TEST_CASE("decorrelation noise lands at the exact energy ratio") {
  auto im = testutil::white_buffer(20000, 12);
  for (double level : {-100.0, -80.0, -60.0}) {
    CAPTURE(level);
    Rng rng(13);
    auto out = add_decorrelation_noise(im, level, rng);
    std::vector<double> added(out.num_samples());
    for (std::size_t i = 0; i < added.size(); ++i)
      added[i] = out.channel(0)[i] - im.channel(0)[i];
    const double ratio = testutil::energy(added) /
                         testutil::energy(mono_view(im));
    CHECK(std::abs(ratio / std::pow(10.0, level / 10.0) - 1.0) < 1e-9);
  }
}

TEST_CASE("decorrelation level above the cap is rejected") {
  auto im = testutil::white_buffer(1000, 14);
  Rng rng(15);
  CHECK_THROWS_AS(add_decorrelation_noise(im, -50.0, rng), InvalidArgument);
}

TEST_CASE("minus infinity disables decorrelation exactly") {
  auto im = testutil::white_buffer(1000, 16);
  Rng rng(17);
  auto out = add_decorrelation_noise(im, kNoDecorrelation, rng);
  CHECK(testutil::bit_identical(mono_view(im), mono_view(out)));
}

TEST_CASE("decorrelation sampler obeys its knobs") {
  DecorrelationSampler s;
  s.p_off = 1.0;
  Rng rng(18);
  for (int i = 0; i < 50; ++i) CHECK(s.sample(rng) == kNoDecorrelation);

  s.p_off = 0.0;
  s.min_db = -90.0;
  s.max_db = -70.0;
  for (int i = 0; i < 500; ++i) {
    double level = s.sample(rng);
    CHECK(level >= -90.0);
    CHECK(level <= -70.0);
  }

  DecorrelationSampler bad;
  bad.max_db = -50.0;  // must stay at or below -60 dB
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("more decorrelation noise lowers coherence") {
  RtfSet set = small_set();
  auto ref = testutil::white_buffer(48000, 19);
  double msc_quiet, msc_loud;
  {
    Rng rng(20);
    auto p = render_single_source(ref, &set, AugmentMethod::Individual,
                                  "t01", 0.0, -100.0, rng);
    msc_quiet = mean_msc(p.om, p.im);
  }
  {
    Rng rng(20);
    auto p = render_single_source(ref, &set, AugmentMethod::Individual,
                                  "t01", 0.0, -60.0, rng);
    msc_loud = mean_msc(p.om, p.im);
  }
  CHECK(msc_quiet > msc_loud);
  CHECK(msc_quiet > 0.99);
}

TEST_CASE("artificial-head methods demand a single head tag") {
  RtfSet multi = small_set();
  Rng rng(21);
  CHECK_THROWS_AS(
      choose_rtf_talker(AugmentMethod::ArtificialHead, multi, "t01", rng),
      SchemaError);

  RtfSet head = make_fixture_rtf_set(GridTag::AhCoarse, {"AH"}, 4, 16000,
                                     512, 22);
  CHECK(choose_rtf_talker(AugmentMethod::ArtificialHead, head, "t01", rng) ==
        "AH");
  // No draw happens for the head methods.
  Rng before(23), after(23);
  choose_rtf_talker(AugmentMethod::ArtificialHeadFine, head, "t01", before);
  CHECK(before.next_u64() == after.next_u64());
}

TEST_CASE("non-individual draws avoid the own talker") {
  RtfSet set = small_set();
  Rng rng(24);
  std::set<std::string> seen;
  for (int i = 0; i < 100; ++i)
    seen.insert(
        choose_rtf_talker(AugmentMethod::NonIndividual, set, "t02", rng));
  CHECK(seen == std::set<std::string>{"t01", "t03"});
}

TEST_CASE("individual method uses the speaker's own responses") {
  RtfSet set = small_set();
  Rng rng(25);
  CHECK(choose_rtf_talker(AugmentMethod::Individual, set, "t03", rng) ==
        "t03");
}

TEST_CASE("source mode sampling follows p_single") {
  auto policy = policy_for(AugmentMethod::Individual,
                           SourceMode::RandomEachRecord);
  policy.p_single = 1.0;
  Rng rng(26);
  for (int i = 0; i < 20; ++i)
    CHECK(sample_source_mode(policy, rng) == SourceMode::SingleSource);
  policy.p_single = 0.0;
  for (int i = 0; i < 20; ++i)
    CHECK(sample_source_mode(policy, rng) == SourceMode::PseudoDiffuse);

  auto fixed = policy_for(AugmentMethod::Individual);
  CHECK_THROWS_AS(sample_source_mode(fixed, rng), InvalidArgument);
}

TEST_CASE("same seed reproduces the render, different seed varies it") {
  RtfSet set = small_set();
  auto ref = testutil::white_buffer(8000, 27);
  auto policy = policy_for(AugmentMethod::NonIndividual,
                           SourceMode::RandomEachRecord);
  policy.decorrelation.p_off = 0.0;

  Rng a(28), b(28), c(29);
  auto pa = augment(ref, policy, &set, "t01", a);
  auto pb = augment(ref, policy, &set, "t01", b);
  auto pc = augment(ref, policy, &set, "t01", c);

  CHECK(testutil::bit_identical(mono_view(pa.im), mono_view(pb.im)));
  CHECK(pa.provenance.decorrelation_db == pb.provenance.decorrelation_db);
  CHECK_FALSE(testutil::bit_identical(mono_view(pa.im), mono_view(pc.im)));
}

TEST_CASE("methods without a set in hand fail loudly") {
  auto ref = testutil::white_buffer(1000, 30);
  Rng rng(31);
  CHECK_THROWS_AS(augment(ref, policy_for(AugmentMethod::Individual),
                          nullptr, "t01", rng),
                  InvalidArgument);
}

TEST_CASE("method and mode names round trip") {
  for (AugmentMethod m :
       {AugmentMethod::NoImNoise, AugmentMethod::ArtificialHead,
        AugmentMethod::ArtificialHeadFine, AugmentMethod::NonIndividual,
        AugmentMethod::Individual}) {
    CHECK(augment_method_from_string(to_string(m)) == m);
  }
  for (SourceMode m : {SourceMode::SingleSource, SourceMode::PseudoDiffuse,
                       SourceMode::RandomEachRecord}) {
    CHECK(source_mode_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(augment_method_from_string("bogus"), InvalidArgument);
}

}  // TEST_SUITE("augment")

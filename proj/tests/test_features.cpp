// Copyright 2026 The segser Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "segser/error.hpp"
#include "segser/features.hpp"
#include "support/signals.hpp"
#include "support/synth_corpus.hpp"

using namespace segser;
using doctest::Approx;

namespace {

using Pitches = std::vector<std::optional<double>>;

ExtractionConfig make_config(SegmentationScheme scheme, bool hist, double h = 50.0) {
  ExtractionConfig c;
  c.scheme = scheme;
  c.include_hist = hist;
  c.hist.h = h;
  return c;
}

// Direct two-pass statistics, written independently of the library.
struct Oracle {
  double mean, std, kurt, skew, mn, mx, pmin, pmax, slope, offset, mse;
};

Oracle oracle(const std::vector<double>& x) {
  const double m = static_cast<double>(x.size());
  Oracle o{};
  o.mean = std::accumulate(x.begin(), x.end(), 0.0) / m;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - o.mean;
    m2 += d * d / m;
    m3 += d * d * d / m;
    m4 += d * d * d * d / m;
  }
  o.std = std::sqrt(m2);
  o.skew = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
  o.kurt = m2 > 0 ? m4 / (m2 * m2) : 0.0;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  o.mn = *lo;
  o.mx = *hi;
  const double denom = x.size() > 1 ? m - 1.0 : 1.0;
  o.pmin = static_cast<double>(std::min_element(x.begin(), x.end()) - x.begin()) / denom;
  o.pmax = static_cast<double>(std::max_element(x.begin(), x.end()) - x.begin()) / denom;
  // Normal equations for y = offset + slope * t.
  double st = 0, stt = 0, sy = 0, sty = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x.size() > 1 ? static_cast<double>(i) / denom : 0.0;
    st += t;
    stt += t * t;
    sy += x[i];
    sty += t * x[i];
  }
  const double det = m * stt - st * st;
  o.slope = det != 0 ? (m * sty - st * sy) / det : 0.0;
  o.offset = (sy - o.slope * st) / m;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x.size() > 1 ? static_cast<double>(i) / denom : 0.0;
    const double r = x[i] - o.offset - o.slope * t;
    sse += r * r;
  }
  o.mse = sse / m;
  return o;
}

}  // namespace

TEST_CASE("histogram parameters") {
  CHECK(HistogramParams{}.bin_count() == 9);
  CHECK(HistogramParams{50, 500, 25}.bin_count() == 18);
  CHECK_THROWS_AS(HistogramParams({50, 500, 40}).validate(), Error);
  CHECK_THROWS_AS(HistogramParams({500, 50, 50}).validate(), Error);
  CHECK_THROWS_AS(HistogramParams({50, 500, 0}).validate(), Error);
  CHECK_THROWS_AS(HistogramParams({50, 500, -50}).validate(), Error);
}

TEST_CASE("histogram examples") {
  SUBCASE("single-bin mass") {
    const Pitches p(40, 120.0);
    const auto h = pitch_histogram(p);
    REQUIRE(h.heights.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(h.heights[i] == (i == 1 ? 1.0 : 0.0));
  }
  SUBCASE("no voiced frames") {
    const Pitches p(25, std::nullopt);
    const auto h = pitch_histogram(p);
    REQUIRE(h.heights.size() == 9);
    for (double v : h.heights) CHECK(v == 0.0);
  }
  SUBCASE("hand-counted values") {
    const Pitches p{60.0, 60.0, 160.0, 460.0};
    const std::vector<double> expected{0.5, 0, 0.25, 0, 0, 0, 0, 0, 0.25};
    CHECK(pitch_histogram(p).heights == expected);
  }
  SUBCASE("unvoiced and out-of-range values are ignored") {
    const Pitches p{std::nullopt, 40.0, 60.0, 600.0, 110.0, std::nullopt};
    const auto h = pitch_histogram(p).heights;
    CHECK(h[0] == 0.5);
    CHECK(h[1] == 0.5);
  }
  SUBCASE("bin edges") {
    const Pitches p{50.0, 100.0, 500.0, 499.999};
    const auto h = pitch_histogram(p).heights;
    CHECK(h[0] == 0.25);
    CHECK(h[1] == 0.25);
    CHECK(h[8] == 0.5);
  }
}

TEST_CASE("histogram normalisation and permutation invariance") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> hz(0.0, 700.0);
  std::uniform_int_distribution<int> len(1, 200);
  std::bernoulli_distribution voiced(0.6);
  for (int trial = 0; trial < 2000; ++trial) {
    Pitches p(static_cast<std::size_t>(len(rng)));
    bool any = false;
    for (auto& v : p) {
      if (voiced(rng)) {
        v = hz(rng);
        any = any || (*v >= 50.0 && *v <= 500.0);
      }
    }
    const auto h = pitch_histogram(p).heights;
    const double sum = std::accumulate(h.begin(), h.end(), 0.0);
    for (double v : h) CHECK(v >= 0.0);
    if (any) {
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    } else {
      CHECK(sum == 0.0);
    }
    auto q = p;
    std::shuffle(q.begin(), q.end(), rng);
    const auto hq = pitch_histogram(q).heights;
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(hq[i] == Approx(h[i]).epsilon(1e-12));
  }
}

TEST_CASE("functionals of a constant contour") {
  for (std::size_t m : {1u, 2u, 7u}) {
    const std::vector<double> x(m, 3.25);
    const auto f = functionals(x);
    CHECK(f.mean == Approx(3.25));
    CHECK(f.std == 0.0);
    CHECK(f.skewness == 0.0);
    CHECK(f.kurtosis == 0.0);
    CHECK(f.min == 3.25);
    CHECK(f.max == 3.25);
    CHECK(f.rel_min_pos == 0.0);
    CHECK(f.rel_max_pos == 0.0);
    CHECK(f.range == 0.0);
    CHECK(f.lr_offset == Approx(3.25));
    CHECK(f.lr_slope == Approx(0.0));
    CHECK(f.lr_mse == Approx(0.0));
  }
}

TEST_CASE("functionals of a ramp") {
  const std::vector<double> x{0, 1, 2, 3};
  const auto f = functionals(x);
  CHECK(f.mean == Approx(1.5));
  CHECK(f.std == Approx(1.11803).epsilon(1e-5));
  CHECK(f.min == 0.0);
  CHECK(f.max == 3.0);
  CHECK(f.rel_min_pos == 0.0);
  CHECK(f.rel_max_pos == 1.0);
  CHECK(f.range == 3.0);
  CHECK(f.lr_offset == Approx(0.0).scale(1.0));
  CHECK(f.lr_slope == Approx(3.0));
  CHECK(f.lr_mse == Approx(0.0).scale(1.0));
  CHECK(f.skewness == Approx(0.0).scale(1.0));
  // m2 = 1.25, m4 = 2.5625
  CHECK(f.kurtosis == Approx(1.64));
}

TEST_CASE("skewness follows the value distribution") {
  // Values symmetric about their mean.
  const std::vector<double> a{1, 2, 3, 4, 5};
  CHECK(std::abs(functionals(a).skewness) <= 1e-12);
  const std::vector<double> b{3, 1, 2, 5, 4};
  CHECK(std::abs(functionals(b).skewness) <= 1e-12);
  // Time-symmetric but the values {1, 1, 2, 2, 3} lean right:
  // m2 = 0.56, m3 = 0.144.
  const std::vector<double> c{1, 2, 3, 2, 1};
  CHECK(functionals(c).skewness == Approx(0.144 / std::pow(0.56, 1.5)).epsilon(1e-12));
}

TEST_CASE("extremes report the first occurrence") {
  const std::vector<double> x{2, 0, 5, 0, 5, 1};
  const auto f = functionals(x);
  CHECK(f.rel_min_pos == Approx(0.2));
  CHECK(f.rel_max_pos == Approx(0.4));
}

TEST_CASE("singleton contour is well defined") {
  const std::vector<double> x{-4.5};
  const auto f = functionals(x);
  for (double v : f.values()) CHECK(std::isfinite(v));
  CHECK(f.mean == -4.5);
  CHECK(f.lr_offset == -4.5);
}

TEST_CASE("empty contour is rejected") {
  CHECK_THROWS_AS(functionals(std::vector<double>{}), Error);
}

TEST_CASE("functionals agree with direct formulas") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(2.0, 3.0);
  std::uniform_int_distribution<int> len(2, 300);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(len(rng)));
    for (auto& v : x) v = g(rng);
    const auto f = functionals(x);
    const auto o = oracle(x);
    CHECK(f.mean == Approx(o.mean).epsilon(1e-10));
    CHECK(f.std == Approx(o.std).epsilon(1e-10));
    CHECK(f.skewness == Approx(o.skew).epsilon(1e-8).scale(1.0));
    CHECK(f.kurtosis == Approx(o.kurt).epsilon(1e-8));
    CHECK(f.min == o.mn);
    CHECK(f.max == o.mx);
    CHECK(f.range == o.mx - o.mn);
    CHECK(f.rel_min_pos == Approx(o.pmin));
    CHECK(f.rel_max_pos == Approx(o.pmax));
    CHECK(f.lr_slope == Approx(o.slope).epsilon(1e-8).scale(1.0));
    CHECK(f.lr_offset == Approx(o.offset).epsilon(1e-8).scale(1.0));
    CHECK(f.lr_mse == Approx(o.mse).epsilon(1e-8));
    CHECK(f.min <= f.mean);
    CHECK(f.mean <= f.max);
    CHECK(f.rel_min_pos >= 0.0);
    CHECK(f.rel_max_pos <= 1.0);
  }
}

TEST_CASE("feature dimensions of the reference configurations") {
  CHECK(feature_dimension(make_config(SegmentationScheme::gti(), false)) == 384);
  CHECK(feature_dimension(make_config(SegmentationScheme::gti(), true)) == 384 + 9 * 3);
  CHECK(feature_dimension(make_config(SegmentationScheme::rti(3), false)) == 1152);
  CHECK(feature_dimension(make_config(SegmentationScheme::rti(3), true)) == 1179);
  CHECK(feature_dimension(make_config(SegmentationScheme::rti(3), true, 25.0)) == 1206);
}

TEST_CASE("dimension formula over the segment and bin grid") {
  for (int n : {3, 4, 5}) {
    for (double h : {50.0, 25.0}) {
      const auto c = make_config(SegmentationScheme::rti(n), true, h);
      const std::size_t bins = static_cast<std::size_t>(450.0 / h);
      CHECK(feature_dimension(c) == static_cast<std::size_t>(n) * (384 + bins));
      CHECK(build_layout(c).size() == feature_dimension(c));
    }
  }
}

TEST_CASE("layout is a bijection onto coordinates") {
  for (const auto& c : {make_config(SegmentationScheme::gti(), false), make_config(SegmentationScheme::gti(), true),
                        make_config(SegmentationScheme::rti(3), true), make_config(SegmentationScheme::rti(5), true, 25.0)}) {
    const auto layout = build_layout(c);
    REQUIRE(layout.coords.size() == layout.names.size());
    std::set<std::tuple<int, std::size_t, std::size_t, std::size_t, bool>> seen;
    std::set<std::string> names;
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const auto& k = layout.coords[i];
      seen.emplace(static_cast<int>(k.kind), k.segment, k.item, k.functional, k.global);
      names.insert(layout.names[i]);
    }
    CHECK(seen.size() == layout.size());
    CHECK(names.size() == layout.size());
  }
}

TEST_CASE("layout order and names") {
  const auto layout = build_layout(make_config(SegmentationScheme::rti(3), true));
  CHECK(layout.names[0] == "s0.zcr.mean");
  CHECK(layout.names[383] == "s0." + std::string(contour_name(kContours - 1)) + ".lr_mse");
  CHECK(layout.names[384] == "s0.f0hist.50-100");
  CHECK(layout.names[392] == "s0.f0hist.450-500");
  CHECK(layout.names[393] == "s1.zcr.mean");
  const auto g = build_layout(make_config(SegmentationScheme::gti(), true));
  CHECK(g.names[0] == "g.zcr.mean");
  CHECK(g.names[384] == "s0.f0hist.50-100");
  CHECK(g.names[410] == "s2.f0hist.450-500");
}

TEST_CASE("config hash distinguishes extraction settings") {
  const auto a = make_config(SegmentationScheme::rti(3), true);
  auto b = a;
  CHECK(a.hash() == b.hash());
  b.hist.h = 25.0;
  CHECK(a.hash() != b.hash());
  auto c = a;
  c.scheme = SegmentationScheme::rti(4);
  CHECK(a.hash() != c.hash());
  CHECK(a.hash_hex().size() == 16);
}

TEST_CASE("assembled vectors match the layout and the per-region oracle") {
  const auto clip = segser::testing::synth_clip(2, 3);
  for (const auto& c : {make_config(SegmentationScheme::gti(), false), make_config(SegmentationScheme::gti(), true),
                        make_config(SegmentationScheme::rti(3), false), make_config(SegmentationScheme::rti(3), true)}) {
    const auto v = assemble(clip, c);
    CHECK(v.values.size() == feature_dimension(c));
    REQUIRE(v.layout);
    CHECK(v.layout->size() == v.values.size());
    for (double x : v.values) CHECK(std::isfinite(x));
  }

  // The second RTI(3) segment recomputed by hand.
  const auto c = make_config(SegmentationScheme::rti(3), true);
  const auto v = assemble(clip, c);
  const std::size_t total = clip.samples.size();
  const std::size_t lo = total / 3, hi = 2 * total / 3;
  const auto frames = frame_region(clip, lo, hi - lo);
  const auto lld = extract_lld_matrix(frames, clip.sample_rate);
  const auto block = functional_block(lld);
  const std::size_t base = 384 + 9;
  for (std::size_t i = 0; i < 384; ++i) CHECK(v.values[base + i] == block[i]);
  const auto hist = pitch_histogram(lld.pitches()).heights;
  for (std::size_t i = 0; i < 9; ++i) CHECK(v.values[base + 384 + i] == hist[i]);
}

TEST_CASE("global histograms match the RTI(3) histograms") {
  const auto clip = segser::testing::synth_clip(4, 8);
  const auto g = assemble(clip, make_config(SegmentationScheme::gti(), true));
  const auto r = assemble(clip, make_config(SegmentationScheme::rti(3), true));
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(g.values[384 + s * 9 + i] == r.values[s * 393 + 384 + i]);
    }
  }
  const auto plain = assemble(clip, make_config(SegmentationScheme::gti(), false));
  for (std::size_t i = 0; i < 384; ++i) CHECK(g.values[i] == plain.values[i]);
}

TEST_CASE("assembly is deterministic") {
  const auto clip = segser::testing::synth_clip(1, 5);
  const auto c = make_config(SegmentationScheme::rti(3), true);
  CHECK(assemble(clip, c).values == assemble(clip, c).values);
}

TEST_CASE("a segment too short for one frame is rejected") {
  AudioClip clip;
  clip.sample_rate = 16000;
  clip.samples = segser::testing::sine(150.0, 16000, 900, 0.5);
  clip.source_id = "short";
  CHECK_NOTHROW(assemble(clip, make_config(SegmentationScheme::gti(), false)));
  CHECK_THROWS_AS(assemble(clip, make_config(SegmentationScheme::rti(3), false)), Error);
}

#include "doctest.h"

#include "geoleo/signal.hpp"
#include "toy.hpp"

#include <cmath>
#include <random>

using namespace geoleo;
using toy::vec;

TEST_CASE("error floor") {
  const ChannelSet exact = toy::channels({vec({1.0, 0.0})}, {});
  const PrecoderSolution zero = toy::precoders(vec({0.0, 0.0}), vec({0.0, 0.0}), {vec({0.0, 0.0})});
  CHECK(effective_error_floor_lu(0, zero, exact) == 0.0);

  const ChannelSet noisy = toy::channels({vec({1.0, 0.0})}, {}, 0.05);
  PrecoderSolution p = toy::precoders(vec({2.0, 0.0}), vec({0.0, 2.0}), {vec({1.0, 1.0})});  // Σ‖p‖² = 10
  CHECK(effective_error_floor_lu(0, p, noisy) == doctest::Approx(0.5));
  const double before = effective_error_floor_lu(0, p, noisy);
  p.p_spc = vec({3.0, 0.0});
  CHECK(effective_error_floor_lu(0, p, noisy) - before == doctest::Approx(0.05 * 5.0));
}

TEST_CASE("super-common SINR, orthogonal common precoder") {
  const ChannelSet ch = toy::channels({vec({1.0, 0.0})}, {});
  const PrecoderSolution p = toy::precoders(vec({2.0, 0.0}), vec({0.0, 3.0}), {vec({1.0, 0.0})});
  CHECK(sinr_spc_lu(0, p, ch) == doctest::Approx(4.0 / 2.0));
  CHECK(sinr_common(0, p, ch) == 0.0);
  CHECK(sinr_private(0, p, ch) == doctest::Approx(1.0));
  const PrecoderSolution no_spc = toy::precoders(vec({0.0, 0.0}), vec({0.0, 3.0}), {vec({1.0, 0.0})});
  CHECK(sinr_spc_lu(0, no_spc, ch) == 0.0);
}

TEST_CASE("SINRs with an aligned common precoder") {
  const ChannelSet ch = toy::channels({vec({1.0, 0.0})}, {});
  const PrecoderSolution p = toy::precoders(vec({2.0, 0.0}), vec({3.0, 0.0}), {vec({1.0, 0.0})});
  CHECK(sinr_spc_lu(0, p, ch) == doctest::Approx(4.0 / 11.0));
  CHECK(sinr_common(0, p, ch) == doctest::Approx(4.5));
  CHECK(sinr_private(0, p, ch) == doctest::Approx(1.0));

  PrecoderSolution q = p;
  q.c_spc = {std::log2(1.0 + 4.0 / 11.0)};
  q.c = {std::log2(5.5)};
  const RateBreakdown r = rates(q, ch, {10.0});
  CHECK(r.r_total[0] == doctest::Approx(std::log2(15.0 / 11.0) + std::log2(5.5) + 1.0));
  CHECK(r.objective == doctest::Approx(r.r_total[0]));
}

TEST_CASE("private SINR ignores the super-common stream without CSI error") {
  const ChannelSet ch = toy::channels({vec({1.0, 0.5}), vec({0.2, 1.0})}, {});
  PrecoderSolution p = toy::precoders(vec({1.0, 1.0}), vec({0.5, 0.0}), {vec({1.0, 0.0}), vec({0.0, 1.0})});
  const double before = sinr_private(1, p, ch);
  p.p_spc = vec({-4.0, 2.0});
  CHECK(sinr_private(1, p, ch) == before);

  const ChannelSet single = toy::channels({vec({2.0})}, {});
  const PrecoderSolution only = toy::precoders(vec({0.0}), vec({0.0}), {vec({1.5})});
  CHECK(sinr_private(0, only, single) == doctest::Approx(9.0));
}

TEST_CASE("interference leakage") {
  const ChannelSet ch = toy::channels({vec({1.0, 0.0})}, {vec({1.0, 0.0})});
  const PrecoderSolution p = toy::precoders(vec({7.0, 7.0}), vec({1.0, 0.0}), {vec({2.0, 0.0})});
  CHECK(interference_leakage(0, p, ch, false) == doctest::Approx(5.0));
  const PrecoderSolution spc_only = toy::precoders(vec({7.0, 7.0}), vec({0.0, 0.0}), {vec({0.0, 0.0})});
  CHECK(interference_leakage(0, spc_only, ch, false) == 0.0);

  const double s = 1.0 / std::sqrt(2.0);
  const ChannelSet null = toy::channels({vec({1.0, 0.0})}, {vec({s, s})});
  const PrecoderSolution steer = toy::precoders(vec({0.0, 0.0}), vec({s, -s}), {vec({0.0, 0.0})});
  CHECK(interference_leakage(0, steer, null, false) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("rate accounting") {
  const ChannelSet ch = toy::channels({vec({1.0, 0.0}), vec({0.0, 1.0})}, {vec({0.3, 0.3})});
  const PrecoderSolution zero = toy::precoders(vec({0.0, 0.0}), vec({0.0, 0.0}), {vec({0.0, 0.0}), vec({0.0, 0.0})});
  const RateBreakdown r0 = rates(zero, ch, {1.0, 1.0});
  CHECK(r0.objective == 0.0);
  CHECK(r0.r_spc == 0.0);
  CHECK(r0.r_total[1] == 0.0);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  const std::vector<double> demands = {1.5, 1.0};
  for (int trial = 0; trial < 50; ++trial) {
    auto rv = [&] { return vec({{nd(rng), nd(rng)}, {nd(rng), nd(rng)}}); };
    PrecoderSolution p = toy::precoders(rv(), rv(), {rv(), rv()});
    p.c_spc = {0.1, 0.2};
    p.c = {0.3, 0.0};
    const RateBreakdown r = rates(p, ch, demands);
    double rt = 0.0;
    for (int k = 0; k < 2; ++k) {
      CHECK(r.r_spc <= r.r_spc_at_lu[k]);
      CHECK(r.r_c <= r.r_c_at_lu[k]);
      CHECK(r.r_total[k] == doctest::Approx(p.c_spc[k] + p.c[k] + r.r_p[k]));
      rt += r.r_total[k];
    }
    CHECK(r.r_spc <= r.r_spc_at_gu[0]);
    CHECK(r.objective <= std::min(2.5, rt) + 1e-12);

    // SIC removes one interference term at a time.
    for (int k = 0; k < 2; ++k) {
      const double num_spc = std::norm(ch.h_hat[k].dot(p.p_spc));
      const double num_c = std::norm(ch.h_hat[k].dot(p.p_c));
      const double num_p = std::norm(ch.h_hat[k].dot(p.p_priv[k]));
      const double d_spc = num_spc / sinr_spc_lu(k, p, ch);
      const double d_c = num_c / sinr_common(k, p, ch);
      const double d_p = num_p / sinr_private(k, p, ch);
      CHECK(d_spc >= d_c);
      CHECK(d_c >= d_p);
    }
  }
}

TEST_CASE("super-common rate grows with its own power") {
  const ChannelSet ch = toy::channels({vec({1.0, 0.2}), vec({0.3, 1.0})}, {vec({0.5, 0.5})});
  PrecoderSolution p = toy::precoders(vec({1.0, 1.0}), vec({0.5, -0.5}), {vec({0.3, 0.0}), vec({0.0, 0.3})});
  double prev = -1.0;
  double prev_c = -1.0;
  for (int i = 0; i <= 40; ++i) {
    PrecoderSolution q = p;
    q.p_spc *= 0.1 * i;
    q.p_c *= 0.1 * i;
    const RateBreakdown r = rates(q, ch, {1.0, 1.0});
    CHECK(r.r_spc >= prev);
    CHECK(r.r_c >= prev_c);
    prev = r.r_spc;
    prev_c = r.r_c;
  }
}

TEST_CASE("GEO interference enters the floor") {
  ChannelSet ch = toy::channels({vec({1.0, 0.0})}, {});
  ch.g = {vec({2.0})};
  PrecoderSolution p = toy::precoders(vec({0.0, 0.0}), vec({0.0, 0.0}), {vec({0.0, 0.0})});
  p.w = {vec({1.5})};
  CHECK(effective_error_floor_lu(0, p, ch) == doctest::Approx(9.0));
}

#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "blowup6/kernels.hpp"

using namespace blowup::kernels;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("AVX2 kernels are bit-identical to the scalar reference") {
  const KernelTable* v = avx2_kernels();
  if (!v) {
    MESSAGE("AVX2 variant unavailable on this machine; only the scalar table is exercised");
    return;
  }
  const KernelTable& s = scalar_kernels();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (std::size_t n = 1; n <= 67; ++n) {
    std::vector<double> lo(n), di(n), up(n), u(n), x(n), y(n), k(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = d(rng), di[i] = d(rng), up[i] = d(rng), u[i] = d(rng), x[i] = d(rng), y[i] = d(rng), k[i] = d(rng);
    }
    std::vector<double> o1(n), o2(n);
    s.heat_rhs(n, lo.data(), di.data(), up.data(), u.data(), o1.data());
    v->heat_rhs(n, lo.data(), di.data(), up.data(), u.data(), o2.data());
    CHECK(same_bits(o1, o2));
    s.rk_combine(n, 0.75, x.data(), 0.25, y.data(), 1e-3, k.data(), o1.data());
    v->rk_combine(n, 0.75, x.data(), 0.25, y.data(), 1e-3, k.data(), o2.data());
    CHECK(same_bits(o1, o2));
    const auto e1 = s.extrema(n, u.data()), e2 = v->extrema(n, u.data());
    CHECK(e1.max_abs == e2.max_abs);
    CHECK(e1.min_value == e2.min_value);
    CHECK(e1.finite == e2.finite);
  }
}

TEST_CASE("extrema flags non-finite input") {
  std::vector<double> u{1.0, -2.0, std::numeric_limits<double>::quiet_NaN(), 0.5, 0.1, 0.2, 0.3, 0.4, 0.6};
  for (const KernelTable* t : {&scalar_kernels(), avx2_kernels()}) {
    if (!t) continue;
    CHECK_FALSE(t->extrema(u.size(), u.data()).finite);
    u[2] = 3.0;
    const auto e = t->extrema(u.size(), u.data());
    CHECK(e.finite);
    CHECK(e.max_abs == 3.0);
    CHECK(e.min_value == -2.0);
    u[2] = std::numeric_limits<double>::quiet_NaN();
  }
}

TEST_CASE("scalar heat_rhs reference values") {
  // out = lo*u[i-1] + d*u[i] + hi*u[i+1] + |u| u with zero neighbours at the ends.
  std::vector<double> lo{9.0, 1.0, 1.0}, di{-2.0, -2.0, -2.0}, up{1.0, 1.0, 9.0}, u{1.0, -2.0, 3.0}, out(3);
  scalar_kernels().heat_rhs(3, lo.data(), di.data(), up.data(), u.data(), out.data());
  CHECK(out[0] == doctest::Approx(-2.0 - 2.0 + 1.0));
  CHECK(out[1] == doctest::Approx(1.0 + 4.0 + 3.0 - 4.0));
  CHECK(out[2] == doctest::Approx(-2.0 - 6.0 + 9.0));
  CHECK(active_kernels().name != nullptr);
}

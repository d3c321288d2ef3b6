#include "ict/cg.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "ict/exact.hpp"

namespace ict {

namespace {

using cd = std::complex<double>;

int phase_sign(int exponent) { return (exponent % 2 == 0) ? 1 : -1; }

template <typename T, typename Fn>
std::shared_ptr<const T> cache_lookup(std::map<std::tuple<int, int, int>, std::shared_ptr<const T>>& cache,
                                      std::shared_mutex& mtx, Weight l1, Weight l2, Weight lo,
                                      Fn&& compute) {
  const std::tuple<int, int, int> key{l1.doubled(), l2.doubled(), lo.doubled()};
  {
    std::shared_lock lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto value = std::make_shared<const T>(compute());
  std::unique_lock lock(mtx);
  auto [it, inserted] = cache.emplace(key, value);
  return it->second;  // racing writers computed bit-identical tensors
}

}  // namespace

CGTensor<cd> cg_complex(Weight l1, Weight l2, Weight lo) {
  if (!triangle_ok(l1, l2, lo))
    throw std::domain_error("cg_complex: triangle condition violated for (" + l1.str() + "," +
                            l2.str() + "," + lo.str() + ")");
  CGTensor<cd> t{l1, l2, lo, {}};
  t.entries.assign(static_cast<std::size_t>(t.d1()) * t.d2() * t.d3(), cd(0.0, 0.0));
  const int sqrt_factor = lo.doubled() + 1;  // 2lo+1
  for (int i1 = 0; i1 < t.d1(); ++i1) {
    const int m1d = 2 * i1 - l1.doubled();
    for (int i2 = 0; i2 < t.d2(); ++i2) {
      const int m2d = 2 * i2 - l2.doubled();
      const int mod = m1d + m2d;  // selection rule mo = m1 + m2
      if (std::abs(mod) > lo.doubled()) continue;
      const int i3 = (mod + lo.doubled()) / 2;
      ExactRadical w = wigner3j(l1, l2, lo, m1d, m2d, -mod);
      if (w.is_zero()) continue;
      ExactRadical val(phase_sign((l1.doubled() - l2.doubled() + mod) / 2) * w.sign(),
                       w.radicand() * sqrt_factor);
      t.at(i1, i2, i3) = cd(val.to_double(), 0.0);
    }
  }
  return t;
}

MatC complex_to_real_basis(Weight l) {
  if (!l.is_integer()) throw std::domain_error("complex_to_real_basis: half-integer l has no real form");
  const int li = l.as_int();
  const int n = l.dim();
  MatC u = MatC::Zero(n, n);
  const double inv_rt2 = 1.0 / std::sqrt(2.0);
  u(li, li) = cd(1.0, 0.0);  // m = 0
  for (int m = 1; m <= li; ++m) {
    const int row_pos = li + m, row_neg = li - m;
    const int col_pos = li + m, col_neg = li - m;
    const double cs = (m % 2 == 0) ? 1.0 : -1.0;  // Condon-Shortley (-1)^m
    // Y_{l,m}  = (Y_l^{-m} + (-1)^m Y_l^m) / sqrt(2)
    u(row_pos, col_neg) = cd(inv_rt2, 0.0);
    u(row_pos, col_pos) = cd(cs * inv_rt2, 0.0);
    // Y_{l,-m} = i (Y_l^{-m} - (-1)^m Y_l^m) / sqrt(2)
    u(row_neg, col_neg) = cd(0.0, inv_rt2);
    u(row_neg, col_pos) = cd(0.0, -cs * inv_rt2);
  }
  return u;
}

CGTensor<double> cg_real(Weight l1, Weight l2, Weight lo) {
  if (!(l1.is_integer() && l2.is_integer() && lo.is_integer()))
    throw std::domain_error("cg_real: all weights must be integers");
  CGTensor<cd> c = cg_complex(l1, l2, lo);
  const MatC u1 = complex_to_real_basis(l1);
  const MatC u2 = complex_to_real_basis(l2);
  const MatC uo = complex_to_real_basis(lo);

  // X[a,b,c] = sum conj(u1[a,m1]) conj(u2[b,m2]) uo[c,mo] C[m1,m2,mo].
  // Contract one index at a time; the u's have at most two nonzeros per row.
  CGTensor<cd> x{l1, l2, lo, {}};
  x.entries.assign(c.entries.size(), cd(0.0, 0.0));
  const int d1 = c.d1(), d2 = c.d2(), d3 = c.d3();
  for (int a = 0; a < d1; ++a)
    for (int m1 = 0; m1 < d1; ++m1) {
      const cd w1 = std::conj(u1(a, m1));
      if (w1 == cd(0.0, 0.0)) continue;
      for (int b = 0; b < d2; ++b)
        for (int m2 = 0; m2 < d2; ++m2) {
          const cd w12 = w1 * std::conj(u2(b, m2));
          if (w12 == cd(0.0, 0.0)) continue;
          for (int co = 0; co < d3; ++co) {
            cd acc(0.0, 0.0);
            for (int mo = 0; mo < d3; ++mo) {
              const cd w3 = uo(co, mo);
              if (w3 != cd(0.0, 0.0)) acc += w3 * c.at(m1, m2, mo);
            }
            x.at(a, b, co) += w12 * acc;
          }
        }
    }

  // Odd l1+l2+lo comes out purely imaginary; one global phase fixes it.
  const bool odd = ((l1.doubled() + l2.doubled() + lo.doubled()) / 2) % 2 == 1;
  CGTensor<double> r{l1, l2, lo, {}};
  r.entries.resize(x.entries.size());
  double max_imag = 0.0;
  for (std::size_t i = 0; i < x.entries.size(); ++i) {
    const cd v = odd ? cd(0.0, 1.0) * x.entries[i] : x.entries[i];
    max_imag = std::max(max_imag, std::abs(v.imag()));
    r.entries[i] = v.real();
  }
  if (max_imag > 1e-12)
    throw std::runtime_error("cg_real: imaginary residue " + std::to_string(max_imag) +
                             " exceeds 1e-12; phase convention is inconsistent");
  return r;
}

namespace {
std::map<std::tuple<int, int, int>, std::shared_ptr<const CGTensor<double>>> real_cache;
std::map<std::tuple<int, int, int>, std::shared_ptr<const CGTensor<cd>>> complex_cache;
std::shared_mutex real_mtx, complex_mtx;
}  // namespace

std::shared_ptr<const CGTensor<double>> cg_real_cached(Weight l1, Weight l2, Weight lo) {
  return cache_lookup(real_cache, real_mtx, l1, l2, lo, [&] { return cg_real(l1, l2, lo); });
}

std::shared_ptr<const CGTensor<cd>> cg_complex_cached(Weight l1, Weight l2, Weight lo) {
  return cache_lookup(complex_cache, complex_mtx, l1, l2, lo,
                      [&] { return cg_complex(l1, l2, lo); });
}

void clear_cg_caches() {
  {
    std::unique_lock lock(real_mtx);
    real_cache.clear();
  }
  std::unique_lock lock(complex_mtx);
  complex_cache.clear();
}

}  // namespace ict

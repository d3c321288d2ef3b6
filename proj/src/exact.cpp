#include "ict/exact.hpp"

#include <stdexcept>

namespace ict {

namespace {

mpz_class factorial(long n) {
  if (n < 0) throw std::logic_error("factorial of negative argument");
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

int parity_sign(long k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace

ExactRadical::ExactRadical(int sign, mpq_class radicand) : sign_(sign), radicand_(std::move(radicand)) {
  if (sign_ < -1 || sign_ > 1) throw std::invalid_argument("ExactRadical: sign must be -1, 0 or +1");
  if (radicand_ < 0) throw std::invalid_argument("ExactRadical: radicand must be >= 0");
  radicand_.canonicalize();
  if (radicand_ == 0) sign_ = 0;
  if (sign_ == 0) radicand_ = 0;
}

ExactRadical ExactRadical::from_rational(const mpq_class& r) {
  const int s = sgn(r);
  return ExactRadical(s, r * r);
}

ExactRadical ExactRadical::operator*(const ExactRadical& o) const {
  if (sign_ == 0 || o.sign_ == 0) return zero();
  return ExactRadical(sign_ * o.sign_, radicand_ * o.radicand_);
}

double ExactRadical::to_double() const {
  if (sign_ == 0) return 0.0;
  // 256-bit intermediate: the final get_d() is the only rounding that matters.
  mpf_class num(radicand_.get_num(), 256), den(radicand_.get_den(), 256);
  mpf_class val(0, 256);
  val = num / den;
  mpf_class root(0, 256);
  mpf_sqrt(root.get_mpf_t(), val.get_mpf_t());
  return sign_ * root.get_d();
}

std::string ExactRadical::str() const {
  if (sign_ == 0) return "0";
  return std::string(sign_ < 0 ? "-" : "+") + "sqrt(" + radicand_.get_str() + ")";
}

ExactRadical wigner3j(Weight j1, Weight j2, Weight j3, int m1d, int m2d, int m3d) {
  const int j1d = j1.doubled(), j2d = j2.doubled(), j3d = j3.doubled();
  // m must be in the same integer/half-integer class as its j.
  if ((j1d - m1d) % 2 != 0 || (j2d - m2d) % 2 != 0 || (j3d - m3d) % 2 != 0)
    throw std::invalid_argument("wigner3j: m is not a valid projection of j");
  if (std::abs(m1d) > j1d || std::abs(m2d) > j2d || std::abs(m3d) > j3d) return ExactRadical::zero();
  if (m1d + m2d + m3d != 0) return ExactRadical::zero();
  if (!triangle_ok(j1, j2, j3)) return ExactRadical::zero();

  // All factorial arguments below are non-negative integers.
  const long a = (j1d + j2d - j3d) / 2;
  const long b = (j1d - j2d + j3d) / 2;
  const long c = (-j1d + j2d + j3d) / 2;
  const long j1pm = (j1d + m1d) / 2, j1mm = (j1d - m1d) / 2;
  const long j2pm = (j2d + m2d) / 2, j2mm = (j2d - m2d) / 2;
  const long j3pm = (j3d + m3d) / 2, j3mm = (j3d - m3d) / 2;

  // Racah sum: S = sum_k (-1)^k / [ k! (a-k)! (j1-m1-k)! (j2+m2-k)!
  //                                 (j3-j2+m1+k)! (j3-j1-m2+k)! ]
  const long t1 = (j3d - j2d + m1d) / 2;
  const long t2 = (j3d - j1d - m2d) / 2;
  long k_lo = std::max(0L, std::max(-t1, -t2));
  long k_hi = std::min(a, std::min(j1mm, j2pm));
  mpq_class sum(0);
  for (long k = k_lo; k <= k_hi; ++k) {
    mpz_class den = factorial(k) * factorial(a - k) * factorial(j1mm - k) * factorial(j2pm - k) *
                    factorial(t1 + k) * factorial(t2 + k);
    mpq_class term(parity_sign(k), den);
    term.canonicalize();
    sum += term;
  }
  if (sum == 0) return ExactRadical::zero();

  // Delta(j1 j2 j3) and the m-dependent factorial product stay under the root.
  mpq_class delta(factorial(a) * factorial(b) * factorial(c),
                  factorial((j1d + j2d + j3d) / 2 + 1));
  delta.canonicalize();
  mpz_class mprod = factorial(j1pm) * factorial(j1mm) * factorial(j2pm) * factorial(j2mm) *
                    factorial(j3pm) * factorial(j3mm);

  const int phase = parity_sign((j1d - j2d - m3d) / 2);
  ExactRadical s_part = ExactRadical::from_rational(sum);
  return ExactRadical(phase * s_part.sign(), s_part.radicand() * delta * mpq_class(mprod));
}

std::uint64_t multiplicity(int n, Weight l) {
  if (n < 1) throw std::invalid_argument("multiplicity: n must be >= 1");
  if (!l.is_integer()) return 0;
  const int li = l.as_int();
  if (li > n || li < 0) return 0;
  if (n == 1) return li == 1 ? 1 : 0;  // the (n-2)! in the sum needs n >= 2

  mpz_class acc(0);
  for (int i = 0; 3 * i <= n - li; ++i) {
    mpz_class num = factorial(n) * factorial(2 * n - 3 * i - li - 2);
    mpz_class den = factorial(i) * factorial(n - i) * factorial(n - 2) * factorial(n - 3 * i - li);
    mpz_class term = num / den;  // each term is an exact integer
    if (num % den != 0) throw std::logic_error("multiplicity: non-integer term");
    acc += (i % 2 == 0) ? term : -term;
  }
  if (acc < 0) throw std::logic_error("multiplicity: negative result");
  if (!acc.fits_ulong_p()) throw std::overflow_error("multiplicity: result exceeds 64 bits");
  return static_cast<std::uint64_t>(acc.get_ui());
}

std::uint64_t end_dimension(int n) {
  std::uint64_t total = 0;
  for (int l = 0; l <= n; ++l) {
    const std::uint64_t m = multiplicity(n, Weight::integer(l));
    total += m * m;
  }
  return total;
}

}  // namespace ict

#include "nmm/specfun.hpp"

#include <quadmath.h>

#include <cmath>
#include <stdexcept>

namespace nmm {

namespace {

// Minimal complex arithmetic on __float128. The ascending series for
// J + iY cancels down to ~e^{-2 Im z} of its largest term, so double
// accumulation would lose one digit per 1.15 units of Im z.
struct QC {
  __float128 re, im;
};

inline QC qc(double re, double im = 0.0) { return {re, im}; }
inline QC operator+(QC a, QC b) { return {a.re + b.re, a.im + b.im}; }
inline QC operator-(QC a, QC b) { return {a.re - b.re, a.im - b.im}; }
inline QC operator*(QC a, QC b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline QC operator*(__float128 s, QC a) { return {s * a.re, s * a.im}; }
inline QC qdiv(QC a, __float128 s) { return {a.re / s, a.im / s}; }
inline __float128 qabs2(QC a) { return a.re * a.re + a.im * a.im; }
inline Complex to_double(QC a) { return Complex((double)a.re, (double)a.im); }

constexpr __float128 Q_GAMMA = 0.57721566490153286060651209008240243Q;
constexpr __float128 Q_LN2 = 0.69314718055994530941723212145817657Q;

inline QC qlog_half(QC z) {
  // principal log(z/2)
  return {0.5Q * logq(qabs2(z)) - Q_LN2, atan2q(z.im, z.re)};
}

constexpr double kSwitchRadius = 14.0;

} // namespace

namespace detail {

Complex hankel1_series(int order, Complex zz) {
  const QC z = qc(zz.real(), zz.imag());
  const QC q = qdiv(z * z, 4.0Q);
  const QC mq{-q.re, -q.im};
  const QC L = qlog_half(z);
  const QC i1 = qc(0.0, 1.0);

  if (order == 0) {
    // J0 = sum u_k with u_k = (-q)^k/(k!)^2
    // Y0 = (2/pi)((L + gamma) J0 - sum H_k u_k)
    QC u = qc(1.0);
    QC sj = u;
    QC sh = qc(0.0);
    __float128 Hk = 0.0Q;
    for (int k = 1; k <= 400; ++k) {
      u = qdiv(u * mq, (__float128)k * (__float128)k);
      Hk += 1.0Q / k;
      sj = sj + u;
      sh = sh + Hk * u;
      if (qabs2(u) < 1e-80Q * (qabs2(sj) + 1e-60Q)) break;
    }
    const QC lg{L.re + Q_GAMMA, L.im};
    const QC y0 = qdiv(2.0Q * (lg * sj - sh), M_PIq);
    return to_double(sj + i1 * y0);
  }

  // J1 = (z/2) sum v_k with v_k = (-q)^k/(k! (k+1)!)
  // Y1 = (2/pi) L J1 - 2/(pi z) - (z/(2 pi)) sum (H_k + H_{k+1} - 2 gamma) v_k
  QC v = qc(1.0);
  QC sj = v;
  QC sh = (1.0Q - 2.0Q * Q_GAMMA) * v;
  __float128 Hk = 0.0Q, Hk1 = 1.0Q;
  for (int k = 1; k <= 400; ++k) {
    v = qdiv(v * mq, (__float128)k * (__float128)(k + 1));
    Hk += 1.0Q / k;
    Hk1 += 1.0Q / (k + 1);
    sj = sj + v;
    sh = sh + (Hk + Hk1 - 2.0Q * Q_GAMMA) * v;
    if (qabs2(v) < 1e-80Q * (qabs2(sj) + 1e-60Q)) break;
  }
  const QC zh = qdiv(z, 2.0Q);
  const QC j1 = zh * sj;
  const __float128 za2 = qabs2(z);
  const QC zinv{z.re / za2, -z.im / za2};
  const QC y1 = qdiv(2.0Q * (L * j1) - 2.0Q * zinv - zh * sh, M_PIq);
  return to_double(j1 + i1 * y1);
}

Complex hankel1_asymptotic(int order, Complex z) {
  // H^(1)_nu(z) ~ sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)} sum_k i^k a_k(nu)/z^k
  // with a_{k+1} = a_k (4 nu^2 - (2k+1)^2)/(8(k+1)), summed to optimal truncation.
  const double mu = 4.0 * order * order;
  Complex sum(1.0, 0.0);
  Complex term(1.0, 0.0);
  double prev = 1e300;
  for (int k = 1; k <= 60; ++k) {
    term *= iu * (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * z);
    double mag = std::abs(term);
    if (mag >= prev) break; // divergence onset
    sum += term;
    if (mag < 1e-18 * std::abs(sum)) break;
    prev = mag;
  }
  Complex pref = std::sqrt(2.0 / (M_PI * z)) *
                 std::exp(iu * (z - (order * M_PI / 2.0 + M_PI / 4.0)));
  return pref * sum;
}

} // namespace detail

double hankel_switch_radius() { return kSwitchRadius; }

Complex hankel1(int order, Complex z) {
  if (order != 0 && order != 1)
    throw std::invalid_argument("specfun: hankel1 supports orders 0 and 1");
  if (z == Complex(0.0, 0.0))
    throw std::domain_error("specfun: hankel1 at z = 0");
  if (std::abs(z) < kSwitchRadius) return detail::hankel1_series(order, z);
  return detail::hankel1_asymptotic(order, z);
}

Complex complex_distance(Complex dx, Complex dy) {
  Complex w = dx * dx + dy * dy;
  // Outward stretching keeps Im(w) >= 0; snap rounding dust so the branch
  // choice below cannot flip a physically real distance.
  double scale = std::abs(w);
  if (w.imag() < 0.0 && w.imag() > -16.0 * 2.220446049250313e-16 * scale)
    w = Complex(w.real(), 0.0);
  Complex r = std::sqrt(w);
  if (r.imag() < 0.0 || (r.imag() == 0.0 && r.real() < 0.0)) r = -r;
  return r;
}

Complex complex_distance(Complex x_tilde, Complex y_tilde, double xs, double ys) {
  return complex_distance(x_tilde - xs, y_tilde - ys);
}

} // namespace nmm

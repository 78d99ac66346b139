#ifndef SINGMIN_QUADRATURE_HPP
#define SINGMIN_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <queue>
#include <utility>
#include <vector>

#include "singmin/error.hpp"

namespace singmin {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15 nodes).
inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
std::pair<double, double> gauss_kronrod15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  return {resk * half, std::abs((resk - resg) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b]: the interval
/// with the largest error estimate is bisected until the summed estimate
/// drops below max(abs_tol, rel_tol*|I|).
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                           int max_intervals = 20000) {
  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::priority_queue<Piece> heap;
  auto [v0, e0] = detail::gauss_kronrod15(f, a, b);
  heap.push({a, b, v0, e0});
  double total = v0;
  double err = e0;
  int count = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (count >= max_intervals) break;
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval exhausted at machine precision; keep it and stop refining
      heap.push(worst);
      break;
    }
    auto [vl, el] = detail::gauss_kronrod15(f, worst.a, mid);
    auto [vr, er] = detail::gauss_kronrod15(f, mid, worst.b);
    heap.push({worst.a, mid, vl, el});
    heap.push({mid, worst.b, vr, er});
    ++count;
    total += vl + vr - worst.value;
    err += el + er - worst.error;
    if (count % 64 == 0) {
      // periodic exact re-sum against add/subtract drift
      total = 0.0;
      err = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, err, count};
}

}  // namespace singmin

#endif  // SINGMIN_QUADRATURE_HPP

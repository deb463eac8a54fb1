#include "tbscat/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace tbscat {

Mat2 frame_rotation(int frame) {
  // Frame j is the global chart rotated by (j - 1) * 120 degrees.
  const double a = -2.0 * kPi / 3.0 * (frame - 1);
  const double c = std::cos(a);
  const double s = std::sin(a);
  return {c, -s, s, c};
}

SignedPermutation SignedPermutation::tau(int j) {
  switch (j) {
    case 1: return {{0, 2, 1}, -1};
    case 2: return {{2, 1, 0}, -1};
    case 3: return {{1, 0, 2}, -1};
    default: throw std::invalid_argument("reflection index must be 1, 2 or 3");
  }
}

SignedPermutation SignedPermutation::operator*(const SignedPermutation& other) const {
  // this(other(v))_i = s1 * other(v)[p1[i]] = s1 * s2 * v[p2[p1[i]]]
  std::array<int, 3> p{};
  for (int i = 0; i < 3; ++i) p[i] = other.perm_[perm_[i]];
  return {p, sign_ * other.sign_};
}

SignedPermutation SignedPermutation::inverse() const {
  std::array<int, 3> p{};
  for (int i = 0; i < 3; ++i) p[perm_[i]] = i;
  return {p, sign_};
}

Mat2 SignedPermutation::chart_matrix() const {
  const Vec2 ex = apply(KVector::from_chart({1.0, 0.0})).chart();
  const Vec2 ey = apply(KVector::from_chart({0.0, 1.0})).chart();
  return {ex.x, ey.x, ex.y, ey.y};
}

const std::array<SignedPermutation, 6>& reflection_group() {
  static const std::array<SignedPermutation, 6> group = [] {
    const auto t1 = SignedPermutation::tau(1);
    const auto t2 = SignedPermutation::tau(2);
    const auto t3 = SignedPermutation::tau(3);
    return std::array<SignedPermutation, 6>{SignedPermutation::identity(), t1, t2, t3, t1 * t2, t2 * t1};
  }();
  return group;
}

const std::array<SignedPermutation, 12>& symmetry_group() {
  static const std::array<SignedPermutation, 12> group = [] {
    const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
    std::array<SignedPermutation, 12> g{};
    int n = 0;
    for (int sign : {1, -1})
      for (const auto& p : perms) g[n++] = SignedPermutation(p, sign);
    return g;
  }();
  return group;
}

AnomalousRays anomalous_rays(const KVector& q) {
  const auto& c = q.components();
  return {KVector(c[2], c[0], c[1]), KVector(c[1], c[2], c[0])};
}

double half_line_angle(SectorLabel label) {
  // +l_j has frame-j coordinates (0, 1).
  const KVector l = from_jacobi(0.0, static_cast<double>(label.sign), label.screen);
  return l.chart().angle();
}

int SectorFan::sector_with_label(SectorLabel label) const {
  for (int i = 0; i < 6; ++i)
    if (sectors[i].label == label) return i;
  return -1;
}

namespace {

// True when angle a lies strictly inside (lo, hi) where hi may exceed 2 pi.
bool strictly_inside(double a, double lo, double hi, double eps) {
  double t = a;
  while (t < lo) t += 2.0 * kPi;
  return t > lo + eps && t < hi - eps;
}

AnomalousWindow make_window(const SectorFan& fan, const KVector& ray, double delta_in, double delta_out) {
  const double center = ray.chart().angle();
  int index = -1;
  for (int i = 0; i < 6; ++i)
    if (std::abs(wrap_difference(fan.rays[i] - center)) < 1e-12) index = i;
  if (index < 0) throw DegenerateFan("anomalous direction is not one of the fan rays");
  AnomalousWindow w;
  w.center = fan.rays[index];
  w.outer_lo = w.center - delta_out;
  w.inner_lo = w.center - delta_in;
  w.inner_hi = w.center + delta_in;
  w.outer_hi = w.center + delta_out;
  w.sector_after = index;
  w.sector_before = (index + 5) % 6;
  return w;
}

}  // namespace

SectorFan build_fan(const KVector& q, double delta_in, double delta_out) {
  if (!(delta_in > 0.0 && delta_out > delta_in))
    throw DegenerateFan("window offsets must satisfy 0 < delta_in < delta_out");
  const double qn = norm(q);
  if (!(qn > 0.0)) throw DegenerateFan("wavevector must be nonzero");
  if (std::abs(q.sum()) > 1e-10 * qn) throw DegenerateFan("wavevector is not on the zero-sum plane");

  SectorFan fan;
  fan.q = q;
  fan.delta_in = delta_in;
  fan.delta_out = delta_out;

  const auto& group = reflection_group();
  std::array<int, 6> order{};
  std::array<double, 6> angles{};
  for (int i = 0; i < 6; ++i) angles[i] = group[i].apply(q).chart().angle();
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return angles[a] < angles[b]; });
  for (int i = 0; i < 6; ++i) {
    fan.rays[i] = angles[order[i]];
    fan.ray_elements[i] = group[order[i]];
  }

  double min_gap = 2.0 * kPi;
  for (int i = 0; i < 6; ++i) {
    const double next = i == 5 ? fan.rays[0] + 2.0 * kPi : fan.rays[i + 1];
    min_gap = std::min(min_gap, next - fan.rays[i]);
    fan.sectors[i].begin = fan.rays[i];
    fan.sectors[i].end = next;
  }
  if (min_gap < 1e-8) throw DegenerateFan("wavevector lies on a screen line: rays coincide");

  const double eps = 1e-9;
  for (auto& sector : fan.sectors) {
    int hits = 0;
    for (int j = 1; j <= 3; ++j)
      for (int sign : {1, -1}) {
        const SectorLabel label{j, sign};
        if (strictly_inside(half_line_angle(label), sector.begin, sector.end, eps)) {
          sector.label = label;
          ++hits;
        }
      }
    if (hits != 1) throw DegenerateFan("a K-sector does not contain exactly one screen half-line");
  }

  if (min_gap <= 2.0 * delta_out)
    throw DegenerateFan("window offset delta_out exceeds half of the minimum ray gap");

  const AnomalousRays anomalous = anomalous_rays(q);
  fan.window23 = make_window(fan, anomalous.q23, delta_in, delta_out);
  fan.window21 = make_window(fan, anomalous.q21, delta_in, delta_out);
  return fan;
}

Classification classify(const SectorFan& fan, Vec2 x) {
  Classification out;
  out.angle = x.angle();
  int sector = 5;
  for (int i = 0; i < 5; ++i) {
    if (out.angle >= fan.rays[i] && out.angle < fan.rays[i + 1]) {
      sector = i;
      break;
    }
  }
  out.sector = sector;
  out.label = fan.sectors[sector].label;
  const AnomalousWindow* windows[2] = {&fan.window23, &fan.window21};
  for (int w = 0; w < 2; ++w) {
    const double offset = wrap_difference(out.angle - windows[w]->center);
    if (std::abs(offset) < fan.delta_out) out.window = WindowPosition{w, offset};
  }
  return out;
}

}  // namespace tbscat

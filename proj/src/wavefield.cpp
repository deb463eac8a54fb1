#include "tbscat/wavefield.hpp"

#include <algorithm>

#include "tbscat/fresnel.hpp"

namespace tbscat {

double smoothstep(double z) {
  if (z <= 0.0) return 0.0;
  if (z >= 1.0) return 1.0;
  return z * z * z * (10.0 - 15.0 * z + 6.0 * z * z);
}

double smoothstep_d1(double z) {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  const double u = z * (1.0 - z);
  return 30.0 * u * u;
}

double smoothstep_d2(double z) {
  if (z <= 0.0 || z >= 1.0) return 0.0;
  return 60.0 * z * (1.0 - z) * (1.0 - 2.0 * z);
}

cplx channel_wave(const PairScattering& pair, int frame, const KVector& wave, const ConfigPoint& x) {
  const JacobiPair kp = jacobi(wave, frame);
  const JacobiPair xy = jacobi(x, frame);
  return pair.chi(xy.normal, kp.normal) * std::exp(kI * kp.along * xy.along);
}

namespace {

// Complex chart gradient rotated back from frame coordinates: R^T g.
void rotate_back(const Mat2& r, cplx gx, cplx gy, cplx& out_x, cplx& out_y) {
  out_x = r.a * gx + r.c * gy;
  out_y = r.b * gx + r.d * gy;
}

struct TermSpec {
  int frame;
  SignedPermutation element;
  cplx coeff;
};

}  // namespace

FieldModel::FieldModel(const FieldParams& params) : params_(params) {
  const KVector& q = params_.q;
  const double qn = norm(q);
  if (!(qn > 0.0)) throw DegenerateFan("wavevector must be nonzero");
  if (std::abs(q.sum()) > 1e-10 * qn) throw DegenerateFan("wavevector is not on the zero-sum plane");
  energy_ = qn * qn;
  for (int j = 1; j <= 3; ++j)
    if (std::abs(q.at(j)) <= 1e-12 * qn) throw DegenerateFan("wavevector lies on a screen line");

  bool found = false;
  for (const auto& g : symmetry_group()) {
    const KVector c = g.apply(q);
    if (c.at(1) < 0.0 && c.at(2) > 0.0 && c.at(3) < 0.0) {
      to_canon_ = g;
      q_canon_ = c;
      found = true;
      break;
    }
  }
  if (!found) throw DegenerateFan("no symmetry maps the wavevector to the reference sign pattern");
  g_ = to_canon_.chart_matrix();

  if (!(params_.r1 > 0.0 && params_.r2 > params_.r1))
    throw ConfigInvalid("cutoff radii must satisfy 0 < r1 < r2");

  fan_ = build_fan(q_canon_, params_.delta_in, params_.delta_out);
  validate_radii();

  // Pair data for each distinct |k_j|.
  for (int j = 1; j <= 3; ++j) {
    const double k = std::abs(q_canon_.at(j));
    const bool known = std::any_of(pairs_.begin(), pairs_.end(),
                                   [&](const PairScattering& p) { return std::abs(p.k() - k) <= 1e-12 * k; });
    if (!known) pairs_.push_back(solve_pair(params_.potential, k, params_.pair_tol));
  }

  const cplx s1 = pair_for(std::abs(q_canon_.at(1))).s();
  const cplx s2 = pair_for(std::abs(q_canon_.at(2))).s();
  const cplx s3 = pair_for(std::abs(q_canon_.at(3))).s();
  const cplx r1 = pair_for(std::abs(q_canon_.at(1))).r();
  const cplx r2 = pair_for(std::abs(q_canon_.at(2))).r();
  const cplx r3 = pair_for(std::abs(q_canon_.at(3))).r();
  const auto id = SignedPermutation::identity();
  const auto t1 = SignedPermutation::tau(1);
  const auto t2 = SignedPermutation::tau(2);
  const auto t3 = SignedPermutation::tau(3);

  auto specs_for = [&](SectorLabel label) -> std::vector<TermSpec> {
    if (label == SectorLabel{1, 1}) return {{1, id, s2 * s3}};
    if (label == SectorLabel{3, -1}) return {{3, id, s1 * s2}};
    if (label == SectorLabel{2, 1}) return {{2, id, s1}, {2, t3, s2 * r3}};
    if (label == SectorLabel{2, -1}) return {{2, id, s3}, {2, t1, s2 * r1}};
    if (label == SectorLabel{1, -1}) return {{1, id, 1.0}, {1, t2, r2 * s1}, {1, t3 * t1, r2 * r1}, {1, t3, r3}};
    if (label == SectorLabel{3, 1}) return {{3, id, 1.0}, {3, t2, r2 * s3}, {3, t1 * t3, r2 * r3}, {3, t1, r1}};
    throw DegenerateFan("unexpected sector label");
  };

  for (int i = 0; i < 6; ++i) {
    for (const TermSpec& spec : specs_for(fan_.sectors[i].label)) {
      const KVector wave = spec.element.apply(q_canon_);
      const JacobiPair kp = jacobi(wave, spec.frame);
      Term t;
      t.frame = spec.frame;
      t.rotation = frame_rotation(spec.frame);
      t.k = kp.normal;
      t.p = kp.along;
      t.coeff = spec.coeff;
      t.pair = static_cast<std::size_t>(&pair_for(std::abs(kp.normal)) - pairs_.data());
      sector_terms_[i].push_back(t);
    }
  }

  const cplx big_r1 = r1 * s2 * r3;
  const cplx big_r2 = r3 * r2 * s1 + s3 * r2 * r1;
  const AnomalousRays rays = anomalous_rays(q_canon_);
  // Canonical window 0 sits on q23 with K2+ (R1) against K1- (R2); window 1 on
  // q21 with K3+ (R2) against K2- (R1).
  const std::array<std::pair<SectorLabel, cplx>, 2> first{{{{2, 1}, big_r1}, {{3, 1}, big_r2}}};
  const std::array<std::pair<SectorLabel, cplx>, 2> second{{{{1, -1}, big_r2}, {{2, -1}, big_r1}}};
  const std::array<const AnomalousWindow*, 2> geo{&fan_.window23, &fan_.window21};
  const std::array<KVector, 2> dirs{rays.q23, rays.q21};
  for (int w = 0; w < 2; ++w) {
    Window& win = windows_[w];
    win.geometry = *geo[w];
    win.direction = dirs[w].chart();
    const SectorLabel before = fan_.sectors[win.geometry.sector_before].label;
    const SectorLabel after = fan_.sectors[win.geometry.sector_after].label;
    if (before == first[w].first && after == second[w].first) {
      win.amp_before = first[w].second;
      win.amp_after = second[w].second;
      win.labeled_side_first = 0;
    } else if (after == first[w].first && before == second[w].first) {
      win.amp_after = first[w].second;
      win.amp_before = second[w].second;
      win.labeled_side_first = 1;
    } else {
      throw DegenerateFan("anomalous ray is not bounded by the expected sectors");
    }
  }

  // Report windows in the caller's labelling: q23 = (q3, q1, q2) of the input.
  const AnomalousRays orig = anomalous_rays(q);
  const Vec2 d0 = from_canonical(windows_[0].direction);
  if ((d0 - orig.q23.chart()).norm() > 1e-9 * qn) {
    std::swap(windows_[0], windows_[1]);
    canon_slot_ = {1, 0};
  }

  // Screen half-lines must stay outside the windows.
  for (const Window& win : windows_)
    for (int j = 1; j <= 3; ++j)
      for (int sign : {1, -1}) {
        const double a = half_line_angle({j, sign});
        if (std::abs(wrap_difference(a - win.geometry.center)) <= params_.delta_out)
          throw DegenerateFan("a screen half-line lies inside an anomalous window; reduce delta_out");
      }
}

void FieldModel::validate_radii() const {
  const double w = params_.potential.support_halfwidth();
  // Two strips of half-width w crossing at 60 degrees overlap within radius 2w.
  if (!(params_.r1 > 2.0 * w)) throw ConfigInvalid("r1 must exceed twice the pair support halfwidth");
  for (double ray : fan_.rays)
    for (int j = 1; j <= 3; ++j) {
      const double line = half_line_angle({j, 1});
      if (params_.r1 * std::abs(std::sin(ray - line)) < w)
        throw ConfigInvalid("r1 too small: a ray meets a potential strip beyond r1");
    }
}

const PairScattering& FieldModel::pair_for(double abs_k) const {
  for (const auto& p : pairs_)
    if (std::abs(p.k() - abs_k) <= 1e-12 * std::max(1.0, abs_k)) return p;
  throw std::invalid_argument("no pair solution for the requested wavenumber");
}

KVector FieldModel::anomalous_direction(int which) const {
  return KVector::from_chart(from_canonical(windows_.at(which).direction));
}

WindowAngles FieldModel::window_angles(int which) const {
  const Window& w = windows_.at(which);
  const double c = from_canonical(Vec2::polar(1.0, w.geometry.center)).angle();
  return {c, c - params_.delta_out, c - params_.delta_in, c + params_.delta_in, c + params_.delta_out};
}

std::array<SideAmplitude, 2> FieldModel::side_amplitudes(int which) const {
  const Window& w = windows_.at(which);
  const SideAmplitude before{w.geometry.sector_before, w.amp_before};
  const SideAmplitude after{w.geometry.sector_after, w.amp_after};
  if (w.labeled_side_first == 0) return {before, after};
  return {after, before};
}

double FieldModel::potential_sum(Vec2 x) const {
  const ConfigPoint p = ConfigPoint::from_chart(x);
  const auto& v = params_.potential;
  return v(p.at(1)) + v(p.at(2)) + v(p.at(3));
}

FieldJet FieldModel::canonical_ray_jet(Vec2 y, int sector) const {
  FieldJet out{};
  for (const Term& t : sector_terms_[sector]) {
    const Vec2 f = t.rotation * y;
    const PairScattering::Jet chi = pairs_[t.pair].chi_jet(f.x, t.k);
    const cplx e = t.coeff * std::exp(kI * t.p * f.y);
    cplx gx, gy;
    rotate_back(t.rotation, chi.derivative * e, kI * t.p * chi.value * e, gx, gy);
    out.value += chi.value * e;
    out.dx += gx;
    out.dy += gy;
  }
  return out;
}

namespace {

FieldJet to_caller(const FieldJet& j, const Mat2& g) {
  // grad_x psi(x) = G^T grad_y psi_c(G x).
  FieldJet out{j.value, {}, {}};
  out.dx = g.a * j.dx + g.c * j.dy;
  out.dy = g.b * j.dx + g.d * j.dy;
  return out;
}

}  // namespace

FieldJet FieldModel::psi_ray_jet(Vec2 x) const {
  const Vec2 y = to_canonical(x);
  return to_caller(canonical_ray_jet(y, classify(fan_, y).sector), g_);
}

FieldJet FieldModel::sector_formula_jet(Vec2 x, int sector) const {
  if (sector < 0 || sector > 5) throw std::out_of_range("sector index must be in [0, 6)");
  return to_caller(canonical_ray_jet(to_canonical(x), sector), g_);
}

FieldModel::WindowJet FieldModel::window_jet(Vec2 y, const Classification& cls, const Window& w) const {
  WindowJet out;
  const double r = y.norm();
  const double kappa = std::sqrt(energy_);
  const double d = cls.window->offset;
  const Vec2 rhat = (1.0 / r) * y;
  const Vec2 that{-rhat.y, rhat.x};

  // alpha > 0 on the side preceding the ray (d < 0).
  const double root = std::sqrt(2.0 * kappa * r);
  const double alpha = -root * std::sin(0.5 * d);
  const double dalpha_dr = alpha / (2.0 * r);
  const double dalpha_dtheta = -0.5 * root * std::cos(0.5 * d);
  const Vec2 grad_alpha = dalpha_dr * rhat + (dalpha_dtheta / r) * that;

  const double theta_before = cls.sector == w.geometry.sector_before ? 1.0 : 0.0;
  const double theta_after = cls.sector == w.geometry.sector_after ? 1.0 : 0.0;
  const cplx f = w.amp_before * (fresnel_phi(alpha) - theta_before) + w.amp_after * (fresnel_phi(-alpha) - theta_after);
  const cplx f_alpha = (w.amp_before - w.amp_after) * fresnel_phi_derivative(alpha);
  const cplx plane = std::exp(kI * dot(w.direction, y));
  out.c = plane * f;
  out.grad_x = plane * (kI * w.direction.x * f + f_alpha * grad_alpha.x);
  out.grad_y = plane * (kI * w.direction.y * f + f_alpha * grad_alpha.y);

  const double ad = std::abs(d);
  const double width = params_.delta_out - params_.delta_in;
  if (ad <= params_.delta_in) {
    out.zeta = 1.0;
  } else {
    const double z = (params_.delta_out - ad) / width;
    const double sgn = d > 0.0 ? -1.0 : 1.0;
    out.zeta = smoothstep(z);
    out.zeta_d1 = sgn * smoothstep_d1(z) / width;
    out.zeta_d2 = smoothstep_d2(z) / (width * width);
  }
  return out;
}

FieldJet FieldModel::canonical_corrected_jet(Vec2 y, const Classification& cls) const {
  FieldJet out = canonical_ray_jet(y, cls.sector);
  if (!cls.window) return out;
  const WindowJet wj = window_jet(y, cls, windows_for_canonical(cls.window->which));
  const double r = y.norm();
  const Vec2 that{-y.y / r, y.x / r};
  out.value += wj.zeta * wj.c;
  out.dx += wj.zeta * wj.grad_x + wj.c * (wj.zeta_d1 / r) * that.x;
  out.dy += wj.zeta * wj.grad_y + wj.c * (wj.zeta_d1 / r) * that.y;
  return out;
}

FieldJet FieldModel::psi_corrected_jet(Vec2 x) const {
  const Vec2 y = to_canonical(x);
  return to_caller(canonical_corrected_jet(y, classify(fan_, y)), g_);
}

cplx FieldModel::canonical_window_discrepancy(Vec2 y, const Classification& cls, double vsum) const {
  if (!cls.window) return 0.0;
  const WindowJet wj = window_jet(y, cls, windows_for_canonical(cls.window->which));
  const double r = y.norm();
  const Vec2 that{-y.y / r, y.x / r};
  const cplx dtheta_c = r * (that.x * wj.grad_x + that.y * wj.grad_y);
  return vsum * wj.zeta * wj.c - (wj.zeta_d2 / (r * r)) * wj.c - (2.0 * wj.zeta_d1 / (r * r)) * dtheta_c;
}

FieldSample FieldModel::sample(Vec2 x) const {
  FieldSample out;
  out.potential = potential_sum(x);
  const Vec2 y = to_canonical(x);
  const double r = y.norm();
  if (r == 0.0) return out;
  const Classification cls = classify(fan_, y);
  out.psi_ray = canonical_ray_jet(y, cls.sector).value;
  const FieldJet psi0 = canonical_corrected_jet(y, cls);
  out.psi_zero = psi0.value;
  if (r <= params_.r1) return out;

  const cplx q0 = canonical_window_discrepancy(y, cls, out.potential);
  if (r >= params_.r2) {
    out.psi_one = psi0.value;
    out.discrepancy = q0;
    return out;
  }
  const double len = params_.r2 - params_.r1;
  const double z = (r - params_.r1) / len;
  const double zeta = smoothstep(z);
  const double zeta_d1 = smoothstep_d1(z) / len;
  const double zeta_d2 = smoothstep_d2(z) / (len * len);
  const cplx dr_psi0 = (y.x * psi0.dx + y.y * psi0.dy) / r;
  out.psi_one = zeta * psi0.value;
  out.discrepancy = zeta * q0 - 2.0 * zeta_d1 * dr_psi0 - psi0.value * (zeta_d2 + zeta_d1 / r);
  return out;
}

cplx FieldModel::psi_one(Vec2 x) const {
  const Vec2 y = to_canonical(x);
  const double r = y.norm();
  if (r <= params_.r1) return 0.0;
  const Classification cls = classify(fan_, y);
  const cplx psi0 = canonical_corrected_jet(y, cls).value;
  const double z = (r - params_.r1) / (params_.r2 - params_.r1);
  return smoothstep(z) * psi0;
}

cplx FieldModel::discrepancy(Vec2 x) const {
  if (to_canonical(x).norm() <= params_.r1) return 0.0;
  return sample(x).discrepancy;
}

cplx FieldModel::diffraction_wave(Vec2 x, int which, int side) const {
  if (side != 0 && side != 1) throw std::out_of_range("side must be 0 or 1");
  const Window& w = windows_.at(which);
  const Vec2 y = to_canonical(x);
  const double r = y.norm();
  const double d = wrap_difference(y.angle() - w.geometry.center);
  double alpha = -std::sqrt(2.0 * std::sqrt(energy_) * r) * std::sin(0.5 * d);
  if (w.labeled_side_first == 1) alpha = -alpha;
  if (side == 1) alpha = -alpha;
  return std::exp(kI * dot(w.direction, y)) * fresnel_phi(alpha);
}

}  // namespace tbscat

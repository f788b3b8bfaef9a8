#include "aortamesh/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aortamesh/error.hpp"

namespace aorta::fit {

using tube::QuadMesh;

void validate(const LossWeights& w) {
  if (!(w.chamfer > 0.0)) throw Error(ErrorKind::InvalidArgument, "chamfer weight must be > 0");
  if (!(w.area >= 0.0 && w.flatness >= 0.0 && w.angle >= 0.0 && w.edge >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "quality weights must be >= 0");
  }
}

void validate(const FitConfig& cfg) {
  if (cfg.max_iters < 1) throw Error(ErrorKind::InvalidArgument, "max_iters must be >= 1");
  if (!(cfg.step_size > 0.0)) throw Error(ErrorKind::InvalidArgument, "step_size must be > 0");
  if (!(cfg.stop_rel_change > 0.0)) throw Error(ErrorKind::InvalidArgument, "stop_rel_change must be > 0");
  if (cfg.stop_window < 1) throw Error(ErrorKind::InvalidArgument, "stop_window must be >= 1");
  if (!(cfg.target_chamfer_rms > 0.0)) throw Error(ErrorKind::InvalidArgument, "target_chamfer_rms must be > 0");
  if (!(cfg.smoothing_lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "smoothing_lambda must be >= 0");
  if (cfg.sample_count < 1) throw Error(ErrorKind::InvalidArgument, "sample_count must be >= 1");
  validate(cfg.weights);
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::TargetReached: return "target_reached";
    case Termination::MaxIters: return "max_iters";
  }
  return "unknown";
}

ChamferResult chamfer_loss(std::span<const Vec3> a, const KdTree& b_index) {
  if (a.empty() || b_index.size() == 0) throw Error(ErrorKind::EmptyInput, "chamfer needs two non-empty clouds");
  const auto& b = b_index.points();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  ChamferResult r;
  r.grad_a_to_b.assign(a.size(), Vec3{});
  r.grad_b_to_a.assign(a.size(), Vec3{});

  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto hit = b_index.nearest(a[i]);
    r.a_to_b += hit.distance2;
    r.grad_a_to_b[i] = (a[i] - b[hit.index]) * (2.0 / na);
  }
  r.a_to_b /= na;

  const KdTree a_index(std::vector<Vec3>(a.begin(), a.end()));
  for (const auto& p : b) {
    const auto hit = a_index.nearest(p);
    r.b_to_a += hit.distance2;
    r.grad_b_to_a[hit.index] += (a[hit.index] - p) * (2.0 / nb);
  }
  r.b_to_a /= nb;

  r.value = r.a_to_b + r.b_to_a;
  r.gradient.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.gradient[i] = r.grad_a_to_b[i] + r.grad_b_to_a[i];
  return r;
}

QualityTerms quality_loss(const QuadMesh& mesh) {
  const std::size_t nq = mesh.quads.size();
  const std::size_t nv = mesh.vertices.size();
  QualityTerms out;
  out.grad_area.assign(nv, Vec3{});
  out.grad_flatness.assign(nv, Vec3{});
  out.grad_angle.assign(nv, Vec3{});
  out.grad_edge.assign(nv, Vec3{});
  if (nq == 0) return out;
  const double inv_q = 1.0 / static_cast<double>(nq);

  // Per-quad area and its gradient w.r.t. the 4 corners.
  std::vector<double> area(nq);
  std::vector<std::array<Vec3, 4>> darea(nq);
  double area_sum = 0.0;
  for (std::size_t q = 0; q < nq; ++q) {
    const auto& f = mesh.quads[q];
    const Vec3& p0 = mesh.vertices[f[0]];
    const Vec3& p1 = mesh.vertices[f[1]];
    const Vec3& p2 = mesh.vertices[f[2]];
    const Vec3& p3 = mesh.vertices[f[3]];
    const Vec3 d1 = p2 - p0;
    const Vec3 d2 = p3 - p1;
    const Vec3 av = cross(d1, d2) * 0.5;
    const double a = norm(av);
    if (!(a >= 1e-12)) {
      throw Error(ErrorKind::DegenerateElement, "quad " + std::to_string(q) + " has zero area", {q});
    }
    const Vec3 n = av / a;
    const Vec3 g2 = cross(d2, n) * 0.5;
    const Vec3 g3 = cross(n, d1) * 0.5;
    area[q] = a;
    darea[q] = {-g2, -g3, g2, g3};
    area_sum += a;
  }
  const double mean_area = area_sum * inv_q;

  // Area uniformity.
  double s = 0.0;
  for (std::size_t q = 0; q < nq; ++q) {
    const double r = area[q] / mean_area;
    out.area += (r - 1.0) * (r - 1.0);
    s += (r - 1.0) * r;
  }
  out.area *= inv_q;
  for (std::size_t q = 0; q < nq; ++q) {
    const double r = area[q] / mean_area;
    const double coef = 2.0 * inv_q * ((r - 1.0) - s * inv_q) / mean_area;
    for (int k = 0; k < 4; ++k) out.grad_area[mesh.quads[q][k]] += darea[q][k] * coef;
  }

  for (std::size_t q = 0; q < nq; ++q) {
    const auto& f = mesh.quads[q];
    std::array<Vec3, 4> p;
    for (int k = 0; k < 4; ++k) p[k] = mesh.vertices[f[k]];

    // Flatness: smallest eigenvalue of the corner covariance is the mean
    // squared distance to the best-fit plane.
    const Vec3 c = (p[0] + p[1] + p[2] + p[3]) * 0.25;
    Mat3 cov{};
    for (int k = 0; k < 4; ++k) {
      const Vec3 d = p[k] - c;
      for (int r = 0; r < 3; ++r)
        for (int t = 0; t < 3; ++t) cov[r][t] += 0.25 * d[r] * d[t];
    }
    const SymEigen3 eig = eigen_symmetric(cov);
    const double lam = std::max(eig.values[0], 0.0);
    const Vec3& nrm = eig.vectors[0];
    out.flatness += lam / area[q] * inv_q;
    for (int k = 0; k < 4; ++k) {
      const Vec3 dlam = nrm * (0.5 * dot(nrm, p[k] - c));
      out.grad_flatness[f[k]] += (dlam / area[q] - darea[q][k] * (lam / (area[q] * area[q]))) * inv_q;
    }

    // Corner angles.
    const double inv_corners = inv_q * 0.25;
    for (int k = 0; k < 4; ++k) {
      const int kn = (k + 1) % 4;
      const int kp = (k + 3) % 4;
      const Vec3 u = p[kn] - p[k];
      const Vec3 v = p[kp] - p[k];
      const double lu = norm(u);
      const double lv = norm(v);
      const double g = dot(u, v) / (lu * lv);
      out.angle += g * g * inv_corners;
      const Vec3 dgu = v / (lu * lv) - u * (g / (lu * lu));
      const Vec3 dgv = u / (lu * lv) - v * (g / (lv * lv));
      const double scale = 2.0 * g * inv_corners;
      out.grad_angle[f[kn]] += dgu * scale;
      out.grad_angle[f[kp]] += dgv * scale;
      out.grad_angle[f[k]] -= (dgu + dgv) * scale;
    }

    // Edge-length regularity: var/mean^2 = mean(e^2)/mean(e)^2 - 1.
    std::array<double, 4> e;
    std::array<Vec3, 4> dir;
    double m = 0.0;
    double s2 = 0.0;
    for (int k = 0; k < 4; ++k) {
      const Vec3 d = p[(k + 1) % 4] - p[k];
      e[k] = norm(d);
      dir[k] = d / e[k];
      m += 0.25 * e[k];
      s2 += 0.25 * e[k] * e[k];
    }
    out.edge += (s2 / (m * m) - 1.0) * inv_q;
    for (int k = 0; k < 4; ++k) {
      const double dt = (e[k] / (2.0 * m * m) - s2 / (2.0 * m * m * m)) * inv_q;
      out.grad_edge[f[(k + 1) % 4]] += dir[k] * dt;
      out.grad_edge[f[k]] -= dir[k] * dt;
    }
  }
  return out;
}

TemplateSamples template_samples(const QuadMesh& mesh) {
  TemplateSamples s;
  const auto used = tube::referenced_vertices(mesh);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (!used[v]) continue;
    s.points.push_back(mesh.vertices[v]);
    s.vertex_of_sample.push_back(v);
  }
  for (std::size_t q = 0; q < mesh.quads.size(); ++q) s.points.push_back(tube::quad_centroid(mesh, q));
  return s;
}

TotalLoss total_loss(const QuadMesh& mesh, const KdTree& target_index, const LossWeights& w) {
  const TemplateSamples samples = template_samples(mesh);
  const ChamferResult ch = chamfer_loss(samples.points, target_index);
  const QualityTerms qt = quality_loss(mesh);

  TotalLoss out;
  out.value.chamfer = ch.value;
  out.value.area = qt.area;
  out.value.flatness = qt.flatness;
  out.value.angle = qt.angle;
  out.value.edge = qt.edge;
  out.value.total = w.chamfer * ch.value + w.area * qt.area + w.flatness * qt.flatness + w.angle * qt.angle +
                    w.edge * qt.edge;

  out.gradient.assign(mesh.vertices.size(), Vec3{});
  const std::size_t nvs = samples.vertex_of_sample.size();
  for (std::size_t k = 0; k < nvs; ++k) out.gradient[samples.vertex_of_sample[k]] += ch.gradient[k] * w.chamfer;
  for (std::size_t q = 0; q < mesh.quads.size(); ++q) {
    const Vec3 g = ch.gradient[nvs + q] * (0.25 * w.chamfer);
    for (auto v : mesh.quads[q]) out.gradient[v] += g;
  }
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    out.gradient[v] += qt.grad_area[v] * w.area + qt.grad_flatness[v] * w.flatness + qt.grad_angle[v] * w.angle +
                       qt.grad_edge[v] * w.edge;
  }
  return out;
}

SmoothingOperator::SmoothingOperator(const QuadMesh& mesh, double lambda) : lambda_(lambda) {
  const std::size_t nv = mesh.vertices.size();
  std::vector<std::vector<std::size_t>> adj(nv);
  for (const auto& e : tube::edge_uses(mesh.quads)) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  offsets_.assign(1, 0);
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    neighbours_.insert(neighbours_.end(), row.begin(), row.end());
    offsets_.push_back(neighbours_.size());
  }
}

std::vector<Vec3> SmoothingOperator::apply(std::span<const Vec3> x) const {
  std::vector<Vec3> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec3 acc = x[i] * (1.0 + lambda_ * double(offsets_[i + 1] - offsets_[i]));
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) acc -= x[neighbours_[k]] * lambda_;
    y[i] = acc;
  }
  return y;
}

std::vector<Vec3> SmoothingOperator::solve(std::span<const Vec3> b, std::vector<Vec3> x) const {
  const std::size_t n = b.size();
  if (lambda_ == 0.0) return {b.begin(), b.end()};
  auto dot_all = [n](const std::vector<Vec3>& a, const std::vector<Vec3>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += dot(a[i], c[i]);
    return s;
  };
  double bnorm2 = 0.0;
  for (const auto& v : b) bnorm2 += norm2(v);
  if (bnorm2 == 0.0) return std::vector<Vec3>(n);

  std::vector<Vec3> r(n), z(n), p(n);
  const auto ax = apply(x);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
  auto precondition = [&] {
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / (1.0 + lambda_ * double(offsets_[i + 1] - offsets_[i]));
  };
  precondition();
  p = z;
  double rz = dot_all(r, z);
  // Well conditioned (eigenvalues in [1, 1 + 2 lambda max_degree]); the cap
  // is never reached in practice.
  for (std::size_t it = 0; it < 10 * n + 100; ++it) {
    if (dot_all(r, r) <= 1e-28 * bnorm2) break;
    const auto ap = apply(p);
    const double alpha = rz / dot_all(p, ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += p[i] * alpha;
      r[i] -= ap[i] * alpha;
    }
    precondition();
    const double rz_next = dot_all(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + p[i] * beta;
  }
  return x;
}

FitResult fit_template(const QuadMesh& templ, const KdTree& target_index, const FitConfig& cfg) {
  validate(cfg);
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;

  FitResult result{templ, {}};
  QuadMesh& mesh = result.mesh;
  FitReport& report = result.report;
  const std::size_t nv = mesh.vertices.size();
  std::vector<Vec3> m(nv), v(nv);
  const SmoothingOperator smoothing(mesh, cfg.smoothing_lambda);
  std::vector<Vec3> u = smoothing.apply(mesh.vertices);
  double beta1_t = 1.0;
  double beta2_t = 1.0;

  std::vector<Vec3> previous;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    const TotalLoss loss = total_loss(mesh, target_index, cfg.weights);
    bool finite = std::isfinite(loss.value.total);
    for (std::size_t i = 0; finite && i < nv; ++i) finite = is_finite(loss.gradient[i]);
    if (!finite) {
      throw Error(ErrorKind::Divergence, "non-finite loss or gradient at iteration " + std::to_string(it), {it});
    }
    // Stagnation: no relative decrease beyond stop_rel_change over the
    // window. The non-improving iterate is discarded and the previous one kept.
    if (it >= cfg.stop_window) {
      const double before = report.loss_history[it - cfg.stop_window].total;
      if (loss.value.total > before - cfg.stop_rel_change * std::abs(before)) {
        mesh.vertices = std::move(previous);
        report.terminated_by = Termination::Converged;
        break;
      }
    }
    report.loss_history.push_back(loss.value);
    report.final_chamfer_rms = chamfer_rms(loss.value.chamfer);

    if (report.final_chamfer_rms <= cfg.target_chamfer_rms) {
      report.terminated_by = Termination::TargetReached;
      break;
    }
    if (it + 1 == cfg.max_iters) {
      report.terminated_by = Termination::MaxIters;
      break;
    }

    previous = mesh.vertices;
    const std::vector<Vec3> grad_u = smoothing.solve(loss.gradient, loss.gradient);
    beta1_t *= beta1;
    beta2_t *= beta2;
    for (std::size_t i = 0; i < nv; ++i) {
      for (int a = 0; a < 3; ++a) {
        const double g = grad_u[i][a];
        m[i][a] = beta1 * m[i][a] + (1.0 - beta1) * g;
        v[i][a] = beta2 * v[i][a] + (1.0 - beta2) * g * g;
        const double mhat = m[i][a] / (1.0 - beta1_t);
        const double vhat = v[i][a] / (1.0 - beta2_t);
        u[i][a] -= cfg.step_size * mhat / (std::sqrt(vhat) + eps);
      }
    }
    mesh.vertices = smoothing.solve(u, std::move(mesh.vertices));
  }
  report.iterations_run = report.loss_history.size();
  return result;
}

bool moving_average_non_increasing(std::span<const double> values, std::size_t window) {
  // Consecutive windows share all but one entry, so the average drops (or
  // stays) exactly when the entering value is <= the leaving one.
  if (window == 0) return true;
  for (std::size_t i = window; i < values.size(); ++i) {
    if (values[i] > values[i - window]) return false;
  }
  return true;
}

}  // namespace aorta::fit

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aortamesh/spatial_index.hpp"
#include "aortamesh/tube_template.hpp"

namespace aorta::fit {

struct LossWeights {
  double chamfer = 1.0;
  double area = 0.01;
  double flatness = 0.1;
  double angle = 0.1;
  double edge = 0.01;
};

void validate(const LossWeights& w);

struct FitConfig {
  std::size_t max_iters = 2000;
  double step_size = 0.1;          // mm, Adam learning rate
  double stop_rel_change = 1e-6;   // relative total-loss change over the window
  std::size_t stop_window = 50;
  double target_chamfer_rms = 0.5; // mm
  LossWeights weights;
  std::size_t sample_count = 100000;
  std::uint64_t seed = 1;
  /// Adam runs on u = (I + lambda L) x, with L the graph Laplacian of the
  /// quad edges, so each step moves x by a smooth field. 0 gives plain Adam
  /// on vertex positions.
  double smoothing_lambda = 5.0;
};

void validate(const FitConfig& cfg);

/// Symmetric chamfer: mean squared nearest distance A->B plus B->A.
/// Gradients are w.r.t. the points of A with nearest-neighbour assignments
/// frozen at the current positions.
struct ChamferResult {
  double value = 0.0;
  double a_to_b = 0.0;
  double b_to_a = 0.0;
  std::vector<Vec3> gradient;
  std::vector<Vec3> grad_a_to_b;
  std::vector<Vec3> grad_b_to_a;
};

ChamferResult chamfer_loss(std::span<const Vec3> a, const KdTree& b_index);

/// Scale-invariant element quality terms and their vertex gradients.
///   area:     mean (A_q / mean(A) - 1)^2
///   flatness: mean (rms distance to best-fit plane)^2 / A_q
///   angle:    mean over corners of cos^2(corner angle)
///   edge:     mean of var(edge lengths) / mean(edge length)^2
struct QualityTerms {
  double area = 0.0;
  double flatness = 0.0;
  double angle = 0.0;
  double edge = 0.0;
  std::vector<Vec3> grad_area;
  std::vector<Vec3> grad_flatness;
  std::vector<Vec3> grad_angle;
  std::vector<Vec3> grad_edge;
};

QualityTerms quality_loss(const tube::QuadMesh& mesh);

/// Points standing in for the template surface in the chamfer term:
/// every referenced vertex, then every quad centroid.
struct TemplateSamples {
  std::vector<Vec3> points;
  std::vector<std::size_t> vertex_of_sample;  // first vertex_of_sample.size() samples are vertices
};

TemplateSamples template_samples(const tube::QuadMesh& mesh);

struct LossRecord {
  double total = 0.0;
  double chamfer = 0.0;
  double area = 0.0;
  double flatness = 0.0;
  double angle = 0.0;
  double edge = 0.0;
};

struct TotalLoss {
  LossRecord value;
  std::vector<Vec3> gradient;  // per mesh vertex
};

TotalLoss total_loss(const tube::QuadMesh& mesh, const KdTree& target_index, const LossWeights& w);

/// RMS nearest distance implied by a chamfer value (both directions averaged).
inline double chamfer_rms(double chamfer_value) { return std::sqrt(0.5 * chamfer_value); }

enum class Termination { Converged, TargetReached, MaxIters };
const char* to_string(Termination t);

struct FitReport {
  std::size_t iterations_run = 0;
  std::vector<LossRecord> loss_history;
  double final_chamfer_rms = 0.0;
  Termination terminated_by = Termination::MaxIters;
};

struct FitResult {
  tube::QuadMesh mesh;
  FitReport report;
};

/// Sparse SPD operator I + lambda L over the quad-edge graph.
class SmoothingOperator {
 public:
  SmoothingOperator(const tube::QuadMesh& mesh, double lambda);
  std::vector<Vec3> apply(std::span<const Vec3> x) const;
  /// Solves (I + lambda L) x = b by Jacobi-preconditioned CG from `guess`.
  std::vector<Vec3> solve(std::span<const Vec3> b, std::vector<Vec3> guess) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> neighbours_;
  double lambda_;
};

/// Adam on smoothed vertex coordinates; connectivity is copied unchanged.
FitResult fit_template(const tube::QuadMesh& templ, const KdTree& target_index, const FitConfig& cfg);

/// Whether every `window`-long moving average of `values` is <= the previous one.
bool moving_average_non_increasing(std::span<const double> values, std::size_t window);

}  // namespace aorta::fit

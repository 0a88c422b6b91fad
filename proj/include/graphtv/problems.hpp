#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "graphtv/graph.hpp"

namespace graphtv {

// Data term G exposed through exactly the handles each solver needs:
// grad of G* plus curvature bounds for PG/FISTA, prox of G for PDHG, and
// objective/gap evaluation. Implementations are pure except where noted.
class DataTermOracle {
 public:
  virtual ~DataTermOracle() = default;

  virtual std::size_t dimension() const = 0;
  virtual double eval_g(std::span<const double> u) const = 0;
  // May return +infinity when w is outside dom G*.
  virtual double eval_gstar(std::span<const double> w) const = 0;

  virtual bool has_grad_gstar() const { return false; }
  virtual void grad_gstar(std::span<const double> w,
                          std::span<double> out) const;

  virtual bool has_prox() const { return false; }
  // argmin_u G(u) + (s/2) ||u - z||^2
  virtual void prox_g(std::span<const double> z, double s,
                      std::span<double> out) const;

  // Curvature bounds of G*: l I <= hess G* <= L I (meaningful when
  // grad_gstar is offered).
  virtual double l_gstar() const = 0;
  virtual double big_l_gstar() const = 0;
  double kappa_gstar() const { return big_l_gstar() / l_gstar(); }
};

// Fused Lasso / ROF data term: G(u) = 0.5 ||u - f||^2. Closed forms:
// G*(w) = <f, w> + 0.5||w||^2, grad G*(w) = f + w,
// prox_G(z, s) = (s z + f) / (s + 1). kappa(G*) = 1.
class RofOracle : public DataTermOracle {
 public:
  explicit RofOracle(VertexVector f);

  std::size_t dimension() const override { return f_.size(); }
  double eval_g(std::span<const double> u) const override;
  double eval_gstar(std::span<const double> w) const override;
  bool has_grad_gstar() const override { return true; }
  void grad_gstar(std::span<const double> w, std::span<double> out) const override;
  bool has_prox() const override { return true; }
  void prox_g(std::span<const double> z, double s,
              std::span<double> out) const override;
  double l_gstar() const override { return 1.0; }
  double big_l_gstar() const override { return 1.0; }
  const VertexVector& data() const { return f_; }

 private:
  VertexVector f_;
};

// 2D convolution stencil.
struct BlurKernel {
  int radius = 0;
  std::vector<double> taps;  // (2r+1) x (2r+1), row-major

  // Horizontal motion-blur line: taps uniform 1/(2r+1) along the middle row.
  static BlurKernel motion(int radius);
  static BlurKernel identity_tap();
};

struct CgOptions {
  double tolerance = 1e-12;
  int max_iterations = 10;
};

struct CgReport {
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

// Deconvolution data term G(u) = 0.5 ||A u - f||^2 with A a zero-padded
// convolution on a width x height grid. Offers prox_G only; the prox solves
// (A^T A + s I) u = A^T f + s z by warm-started conjugate gradient. The warm
// start cache is owned by a single solver run.
class DeconvOracle final : public DataTermOracle {
 public:
  DeconvOracle(std::size_t width, std::size_t height, BlurKernel kernel,
               VertexVector f, CgOptions cg = {});

  std::size_t dimension() const override { return width_ * height_; }
  double eval_g(std::span<const double> u) const override;
  // min_y { 0.5||y||^2 + <f, y> : A^T y = w }; +inf when w is not in ran A^T.
  double eval_gstar(std::span<const double> w) const override;
  bool has_prox() const override { return true; }
  void prox_g(std::span<const double> z, double s,
              std::span<double> out) const override;
  double l_gstar() const override { return 1.0; }
  double big_l_gstar() const override { return 1.0; }

  void apply_a(std::span<const double> u, std::span<double> out) const;
  void apply_at(std::span<const double> v, std::span<double> out) const;
  const CgReport& last_cg_report() const { return last_cg_; }
  void reset_warm_start() const;

 private:
  std::size_t width_, height_;
  BlurKernel kernel_;
  VertexVector f_;
  VertexVector atf_;
  CgOptions cg_;
  mutable VertexVector warm_;
  mutable bool warm_valid_ = false;
  mutable CgReport last_cg_;
};

struct DeconvInstance {
  std::size_t width = 0, height = 0;
  BlurKernel kernel;
  VertexVector ground_truth;
  VertexVector observed;
};

// Piecewise-constant random phantom, blurred, with Gaussian noise added.
// Deterministic per seed.
DeconvInstance synth_deconv_instance(std::size_t width, std::size_t height,
                                     std::uint64_t seed, double noise_sigma,
                                     const BlurKernel& kernel);

// P2 (text) PGM, values min-max scaled to 0..255.
void write_pgm(const std::string& path, std::span<const double> img,
               std::size_t width, std::size_t height);

}  // namespace graphtv

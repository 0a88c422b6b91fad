#include "graphtv/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

namespace graphtv {

void DataTermOracle::grad_gstar(std::span<const double>, std::span<double>) const {
  throw std::logic_error("oracle does not offer grad_gstar");
}

void DataTermOracle::prox_g(std::span<const double>, double,
                            std::span<double>) const {
  throw std::logic_error("oracle does not offer prox_g");
}

RofOracle::RofOracle(VertexVector f) : f_(std::move(f)) {
  for (double v : f_)
    if (!std::isfinite(v)) throw std::invalid_argument("rof: non-finite data");
}

double RofOracle::eval_g(std::span<const double> u) const {
  if (u.size() != f_.size()) throw std::invalid_argument("rof: dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < f_.size(); ++i) {
    const double d = u[i] - f_[i];
    s += d * d;
  }
  return 0.5 * s;
}

double RofOracle::eval_gstar(std::span<const double> w) const {
  if (w.size() != f_.size()) throw std::invalid_argument("rof: dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < f_.size(); ++i) s += f_[i] * w[i] + 0.5 * w[i] * w[i];
  return s;
}

void RofOracle::grad_gstar(std::span<const double> w,
                           std::span<double> out) const {
  if (w.size() != f_.size() || out.size() != f_.size())
    throw std::invalid_argument("rof: dimension");
  for (std::size_t i = 0; i < f_.size(); ++i) out[i] = f_[i] + w[i];
}

void RofOracle::prox_g(std::span<const double> z, double s,
                       std::span<double> out) const {
  if (z.size() != f_.size() || out.size() != f_.size())
    throw std::invalid_argument("rof: dimension");
  if (!(s > 0.0)) throw std::invalid_argument("rof: prox weight");
  for (std::size_t i = 0; i < f_.size(); ++i)
    out[i] = (s * z[i] + f_[i]) / (s + 1.0);
}

BlurKernel BlurKernel::motion(int radius) {
  if (radius < 0) throw std::invalid_argument("kernel radius");
  const int n = 2 * radius + 1;
  BlurKernel k;
  k.radius = radius;
  k.taps.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int dx = -radius; dx <= radius; ++dx)
    k.taps[static_cast<std::size_t>(radius) * n + (dx + radius)] = 1.0 / n;
  return k;
}

BlurKernel BlurKernel::identity_tap() {
  BlurKernel k;
  k.radius = 0;
  k.taps = {1.0};
  return k;
}

DeconvOracle::DeconvOracle(std::size_t width, std::size_t height,
                           BlurKernel kernel, VertexVector f, CgOptions cg)
    : width_(width),
      height_(height),
      kernel_(std::move(kernel)),
      f_(std::move(f)),
      cg_(cg) {
  if (f_.size() != width_ * height_)
    throw std::invalid_argument("deconv: data/dims mismatch");
  const std::size_t n = static_cast<std::size_t>(2 * kernel_.radius + 1);
  if (kernel_.taps.size() != n * n)
    throw std::invalid_argument("deconv: kernel taps/radius mismatch");
  double mass = 0.0;
  for (double t : kernel_.taps) mass += std::abs(t);
  if (mass == 0.0) throw std::invalid_argument("deconv: zero kernel");
  atf_.resize(f_.size());
  apply_at(f_, atf_);
  warm_.assign(f_.size(), 0.0);
}

void DeconvOracle::apply_a(std::span<const double> u,
                           std::span<double> out) const {
  const int r = kernel_.radius;
  const int n = 2 * r + 1;
  const int w = static_cast<int>(width_), h = static_cast<int>(height_);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int sx = x + dx, sy = y + dy;
          if (sx < 0 || sx >= w || sy < 0 || sy >= h) continue;  // zero padding
          acc += kernel_.taps[static_cast<std::size_t>(dy + r) * n + (dx + r)] *
                 u[static_cast<std::size_t>(sy) * w + sx];
        }
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
}

void DeconvOracle::apply_at(std::span<const double> v,
                            std::span<double> out) const {
  const int r = kernel_.radius;
  const int n = 2 * r + 1;
  const int w = static_cast<int>(width_), h = static_cast<int>(height_);
  std::fill(out.begin(), out.end(), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double val = v[static_cast<std::size_t>(y) * w + x];
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const int sx = x + dx, sy = y + dy;
          if (sx < 0 || sx >= w || sy < 0 || sy >= h) continue;
          out[static_cast<std::size_t>(sy) * w + sx] +=
              kernel_.taps[static_cast<std::size_t>(dy + r) * n + (dx + r)] * val;
        }
    }
}

double DeconvOracle::eval_g(std::span<const double> u) const {
  if (u.size() != dimension()) throw std::invalid_argument("deconv: dimension");
  std::vector<double> au(dimension());
  apply_a(u, au);
  double s = 0.0;
  for (std::size_t i = 0; i < au.size(); ++i) {
    const double d = au[i] - f_[i];
    s += d * d;
  }
  return 0.5 * s;
}

namespace {

// CG on M x = b where M is SPD (or PSD with consistent b).
template <typename ApplyM>
CgReport conjugate_gradient(ApplyM&& apply_m, std::span<const double> b,
                            std::span<double> x, double tol, int max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), d(n), md(n);
  apply_m(x, md);
  double bnorm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = b[i] - md[i];
    bnorm2 += b[i] * b[i];
  }
  d = r;
  double rr = 0.0;
  for (double v : r) rr += v * v;
  const double stop2 = tol * tol * std::max(bnorm2, 1e-300);
  CgReport rep;
  while (rep.iterations < max_iter && rr > stop2) {
    apply_m(d, md);
    double dmd = 0.0;
    for (std::size_t i = 0; i < n; ++i) dmd += d[i] * md[i];
    if (dmd <= 0.0) break;
    const double alpha = rr / dmd;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * d[i];
      r[i] -= alpha * md[i];
    }
    double rr_new = 0.0;
    for (double v : r) rr_new += v * v;
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) d[i] = r[i] + beta * d[i];
    rr = rr_new;
    ++rep.iterations;
  }
  rep.residual = std::sqrt(rr);
  rep.converged = rr <= stop2;
  return rep;
}

}  // namespace

void DeconvOracle::prox_g(std::span<const double> z, double s,
                          std::span<double> out) const {
  if (z.size() != dimension() || out.size() != dimension())
    throw std::invalid_argument("deconv: dimension");
  if (!(s > 0.0)) throw std::invalid_argument("deconv: prox weight");
  std::vector<double> b(dimension());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = atf_[i] + s * z[i];
  if (!warm_valid_) {
    std::copy(z.begin(), z.end(), warm_.begin());
    warm_valid_ = true;
  }
  std::vector<double> scratch(dimension());
  auto apply_m = [&](std::span<const double> x, std::span<double> y) {
    apply_a(x, scratch);
    apply_at(scratch, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
  };
  last_cg_ = conjugate_gradient(apply_m, b, warm_, cg_.tolerance,
                                cg_.max_iterations);
  std::copy(warm_.begin(), warm_.end(), out.begin());
}

void DeconvOracle::reset_warm_start() const {
  std::fill(warm_.begin(), warm_.end(), 0.0);
  warm_valid_ = false;
}

double DeconvOracle::eval_gstar(std::span<const double> w) const {
  if (w.size() != dimension()) throw std::invalid_argument("deconv: dimension");
  // G = g(A .), g(y) = 0.5||y - f||^2. G*(w) = min { g*(y) : A^T y = w }
  // with g*(y) = 0.5||y||^2 + <f, y>. KKT: y = A nu - f, A^T A nu = w + A^T f.
  std::vector<double> rhs(dimension());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = w[i] + atf_[i];
  std::vector<double> nu(dimension(), 0.0), scratch(dimension());
  auto apply_m = [&](std::span<const double> x, std::span<double> y) {
    apply_a(x, scratch);
    apply_at(scratch, y);
  };
  auto rep = conjugate_gradient(apply_m, rhs, nu, 1e-11, 400);
  std::vector<double> y(dimension());
  apply_a(nu, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= f_[i];
  // Verify A^T y = w; otherwise w is (numerically) outside dom G*.
  std::vector<double> aty(dimension());
  apply_at(y, aty);
  double err = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < aty.size(); ++i) {
    err = std::max(err, std::abs(aty[i] - w[i]));
    scale = std::max(scale, std::abs(w[i]));
  }
  if (!rep.converged && err > 1e-6 * scale)
    return std::numeric_limits<double>::infinity();
  double val = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    val += 0.5 * y[i] * y[i] + f_[i] * y[i];
  return val;
}

DeconvInstance synth_deconv_instance(std::size_t width, std::size_t height,
                                     std::uint64_t seed, double noise_sigma,
                                     const BlurKernel& kernel) {
  if (width < 8 || height < 8)
    throw std::invalid_argument("synth_deconv_instance: dims must be >= 8x8");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> px(0, width - 1), py(0, height - 1);
  DeconvInstance inst;
  inst.width = width;
  inst.height = height;
  inst.kernel = kernel;
  inst.ground_truth.assign(width * height, level(rng));
  const int rects = 6;
  for (int r = 0; r < rects; ++r) {
    std::size_t x0 = px(rng), x1 = px(rng), y0 = py(rng), y1 = py(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    const double v = level(rng);
    for (std::size_t y = y0; y <= y1; ++y)
      for (std::size_t x = x0; x <= x1; ++x)
        inst.ground_truth[y * width + x] = v;
  }
  inst.observed.assign(width * height, 0.0);
  DeconvOracle fwd(width, height, kernel, inst.observed);
  fwd.apply_a(inst.ground_truth, inst.observed);
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (double& v : inst.observed) v += noise(rng);
  }
  return inst;
}

void write_pgm(const std::string& path, std::span<const double> img,
               std::size_t width, std::size_t height) {
  if (img.size() != width * height)
    throw std::invalid_argument("write_pgm: dims mismatch");
  double lo = img[0], hi = img[0];
  for (double v : img) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = (hi > lo) ? hi - lo : 1.0;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P2\n" << width << " " << height << "\n255\n";
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x)
      out << static_cast<int>(std::lround((img[y * width + x] - lo) / span * 255.0))
          << (x + 1 < width ? ' ' : '\n');
  }
}

}  // namespace graphtv

#pragma once

// Test-only reference implementations. Nothing here calls into the code under
// test: objectives and gradients are expanded by hand from the raw frame and
// web-image columns.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace quasc::testing {

struct Instance {
  Eigen::MatrixXd frames;  // d x N
  Eigen::MatrixXd web;     // d x L
  Eigen::VectorXd rho;     // L
};

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Mean cosine over frames, written as a plain double loop.
inline double brute_force_rho(const Eigen::MatrixXd& frames, const Eigen::VectorXd& image) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < frames.cols(); ++j) {
    double dot = 0, nx = 0, nz = 0;
    for (Eigen::Index k = 0; k < frames.rows(); ++k) {
      dot += frames(k, j) * image(k);
      nx += frames(k, j) * frames(k, j);
      nz += image(k) * image(k);
    }
    total += (nx > 0 && nz > 0) ? dot / std::sqrt(nx * nz) : 0.0;
  }
  return total / static_cast<double>(frames.cols());
}

/// N <= 8, d <= 5, L <= 4, non-negative entries.
inline Instance random_instance(std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(1 + rng() % 8);
  const auto d = static_cast<Eigen::Index>(1 + rng() % 5);
  const auto l = static_cast<Eigen::Index>(rng() % 5);
  Instance inst;
  inst.frames.resize(d, n);
  inst.web.resize(d, l);
  inst.rho.resize(l);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < d; ++k) inst.frames(k, j) = 0.05 + uniform01(rng);
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) inst.web(k, i) = uniform01(rng);
    inst.rho(i) = brute_force_rho(inst.frames, inst.web.col(i));
  }
  return inst;
}

inline double oracle_objective(const Instance& inst, const Eigen::VectorXd& a, double gamma) {
  const Eigen::Index d = inst.frames.rows(), n = inst.frames.cols(), l = inst.web.cols();
  std::vector<double> recon(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < d; ++k) recon[static_cast<std::size_t>(k)] += a(j) * inst.frames(k, j);

  double frame_err = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < d; ++k) {
      const double r = inst.frames(k, i) - recon[static_cast<std::size_t>(k)];
      frame_err += r * r;
    }
  double value = frame_err / (2.0 * static_cast<double>(n));
  if (l > 0) {
    double web_err = 0.0;
    for (Eigen::Index i = 0; i < l; ++i) {
      double e = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double r = inst.web(k, i) - recon[static_cast<std::size_t>(k)];
        e += r * r;
      }
      web_err += inst.rho(i) * e;
    }
    value += web_err / (2.0 * static_cast<double>(l));
  }
  double l1 = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) l1 += std::abs(a(j));
  return value + gamma * l1;
}

/// Gradient of the smooth part, summed term by term.
inline Eigen::VectorXd oracle_gradient(const Instance& inst, const Eigen::VectorXd& a) {
  const Eigen::Index d = inst.frames.rows(), n = inst.frames.cols(), l = inst.web.cols();
  Eigen::VectorXd recon = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < n; ++j) recon += a(j) * inst.frames.col(j);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd r = inst.frames.col(i) - recon;
    for (Eigen::Index j = 0; j < n; ++j) grad(j) -= inst.frames.col(j).dot(r) / static_cast<double>(n);
  }
  for (Eigen::Index i = 0; i < l; ++i) {
    const Eigen::VectorXd r = inst.web.col(i) - recon;
    for (Eigen::Index j = 0; j < n; ++j) grad(j) -= inst.rho(i) * inst.frames.col(j).dot(r) / static_cast<double>(l);
  }
  return grad;
}

/// Accelerated projected gradient with adaptive restart on a >= 0.
/// The smooth part is quadratic, so its Hessian and linear term are recovered
/// once from oracle_gradient at 0 and at the unit vectors.
inline Eigen::VectorXd projected_gradient_oracle(const Instance& inst, double gamma, int max_iters = 200000) {
  const Eigen::Index n = inst.frames.cols();
  const Eigen::VectorXd g0 = oracle_gradient(inst, Eigen::VectorXd::Zero(n));
  Eigen::MatrixXd hessian(n, n);
  for (Eigen::Index j = 0; j < n; ++j) hessian.col(j) = oracle_gradient(inst, Eigen::VectorXd::Unit(n, j)) - g0;
  hessian = 0.5 * (hessian + hessian.transpose());

  const double lipschitz = std::max(hessian.cwiseAbs().rowwise().sum().maxCoeff(), 1e-12);
  const double step = 1.0 / lipschitz;
  auto grad = [&](const Eigen::VectorXd& a) { Eigen::VectorXd g = hessian * a + g0; g.array() += gamma; return g; };
  auto value = [&](const Eigen::VectorXd& a) { return 0.5 * a.dot(hessian * a) + g0.dot(a) + gamma * a.sum(); };

  Eigen::VectorXd a = Eigen::VectorXd::Zero(n), y = a;
  double t = 1.0;
  double prev = value(a);
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd next = (y - step * grad(y)).cwiseMax(0.0);
    const double v = value(next);
    if (v > prev) {  // restart momentum
      t = 1.0;
      y = a;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - a);
    const double change = (next - a).cwiseAbs().maxCoeff();
    a = std::move(next);
    t = t_next;
    prev = v;
    if (change < 1e-15 && it > 10) break;
  }
  return a;
}

/// Best label agreement over all relabelings of `predicted` (k! permutations).
inline double permutation_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  const int k = std::max(*std::max_element(predicted.begin(), predicted.end()),
                         *std::max_element(truth.begin(), truth.end())) + 1;
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
      if (perm[static_cast<std::size_t>(predicted[i])] == truth[i]) ++hits;
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(predicted.size());
}

/// Partition with the smallest normalized cut among all 2-way splits.
inline std::vector<int> brute_force_min_ncut(const Eigen::MatrixXd& w) {
  const auto n = static_cast<int>(w.rows());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_labels;
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    if (mask & 1u) continue;  // fix node 0 on side 0 to skip mirrored splits
    double cut = 0, vol_a = 0, vol_b = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const bool ai = (mask >> i) & 1u, aj = (mask >> j) & 1u;
        (ai ? vol_b : vol_a) += w(i, j);
        if (ai != aj && i < j) cut += w(i, j);
      }
    const double ncut = cut / vol_a + cut / vol_b;
    if (ncut < best) {
      best = ncut;
      best_labels.assign(static_cast<std::size_t>(n), 0);
      for (int i = 0; i < n; ++i) best_labels[static_cast<std::size_t>(i)] = static_cast<int>((mask >> i) & 1u);
    }
  }
  return best_labels;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("quasc_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace quasc::testing

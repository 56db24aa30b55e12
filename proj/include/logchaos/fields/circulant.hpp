#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <fftw3.h>

#include "logchaos/errors.hpp"
#include "logchaos/grid.hpp"
#include "logchaos/rng.hpp"

namespace logchaos {

namespace detail {

// The FFTW planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  FftPlan(int dim, int m) : size_(dim == 1 ? std::size_t(m) : std::size_t(m) * m) {
    std::vector<std::complex<double>> scratch(size_);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = dim == 1 ? fftw_plan_dft_1d(m, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED)
                     : fftw_plan_dft_2d(m, m, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw NumericalError("fftw: plan creation failed");
  }
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  /// In-place forward transform.
  void execute(std::vector<std::complex<double>>& data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan_, p, p);
  }
  std::size_t size() const { return size_; }

 private:
  std::size_t size_;
  fftw_plan plan_ = nullptr;
};

inline int next_pow2(double x) {
  int m = 1;
  while (m < x) m *= 2;
  return m;
}

}  // namespace detail

struct LayerSamplerOptions {
  bool force_cholesky = false;
  int embedding_override = 0;  // 0: choose automatically
  double nugget = 1e-10;
  std::size_t max_embedding_points = std::size_t(1) << 24;
};

/// Exact sampler for a stationary isotropic Gaussian field on the grid,
/// with covariance c(r) vanishing for r >= support.
///
/// Circulant embedding on a periodic M^d torus is tried first.  M starts
/// at the smallest power of two >= 2n and doubles until the embedding is
/// spectrally nonnegative (up to nugget * largest eigenvalue) or M h
/// reaches twice the support, where nonnegativity is exact for positive
/// definite kernels.  Otherwise the dense covariance plus a diagonal
/// nugget is Cholesky factored.
class StationaryLayerSampler {
 public:
  using Kernel = std::function<double(double)>;

  StationaryLayerSampler(const GridSpec& grid, const Kernel& cov, double support,
                         LayerSamplerOptions opts = {})
      : grid_(grid) {
    const int n = grid.points_per_axis();
    const double h = grid.spacing();
    std::map<long, double> cache;
    auto kernel = [&](long q) {
      auto it = cache.find(q);
      if (it != cache.end()) return it->second;
      double v = cov(h * std::sqrt(static_cast<double>(q)));
      cache.emplace(q, v);
      return v;
    };

    if (!opts.force_cholesky) {
      int start = opts.embedding_override > 0 ? opts.embedding_override : detail::next_pow2(2.0 * n);
      int guaranteed = std::max(start, detail::next_pow2(2.0 * support / h - 1e-9));
      int last = opts.embedding_override > 0 ? start : guaranteed;
      for (int m = start; m <= last; m *= 2) {
        std::size_t total = grid.dim() == 1 ? std::size_t(m) : std::size_t(m) * m;
        if (total > opts.max_embedding_points) {
          events_.push_back("circulant: embedding M=" + std::to_string(m) + " exceeds the size cap");
          break;
        }
        if (try_embedding(m, kernel, opts.nugget)) return;
      }
      events_.push_back("cholesky fallback with nugget " + format(opts.nugget));
    }
    build_cholesky(kernel, opts.nugget);
  }

  bool uses_circulant() const { return static_cast<bool>(plan_); }
  int embedding_size() const { return m_; }
  const std::vector<std::string>& events() const { return events_; }

  /// Adds one sample of the field to out[0 .. grid.size()).
  void add_sample(ReplicaStream& rng, double* out) const {
    if (plan_) {
      std::vector<std::complex<double>> buf(sqrt_eigen_.size());
      for (std::size_t k = 0; k < buf.size(); ++k) {
        double a = rng.normal();
        double b = rng.normal();
        buf[k] = std::complex<double>(a * sqrt_eigen_[k], b * sqrt_eigen_[k]);
      }
      plan_->execute(buf);
      const int n = grid_.points_per_axis();
      if (grid_.dim() == 1) {
        for (int i = 0; i < n; ++i) out[i] += buf[i].real();
      } else {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) out[std::size_t(i) * n + j] += buf[std::size_t(i) * m_ + j].real();
      }
      return;
    }
    const auto dim = chol_.rows();
    Eigen::VectorXd z(dim);
    for (Eigen::Index k = 0; k < dim; ++k) z[k] = rng.normal();
    Eigen::VectorXd x = chol_.triangularView<Eigen::Lower>() * z;
    for (Eigen::Index k = 0; k < dim; ++k) out[k] += x[k];
  }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

  template <typename K>
  bool try_embedding(int m, K& kernel, double nugget) {
    const int dim = grid_.dim();
    auto plan = std::make_shared<detail::FftPlan>(dim, m);
    std::vector<std::complex<double>> c(plan->size());
    auto fold = [m](int k) { return long(std::min(k, m - k)); };
    if (dim == 1) {
      for (int k = 0; k < m; ++k) c[k] = kernel(fold(k) * fold(k));
    } else {
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) c[std::size_t(k) * m + l] = kernel(fold(k) * fold(k) + fold(l) * fold(l));
    }
    plan->execute(c);
    double lmax = 0.0, lmin = 0.0;
    for (auto& v : c) {
      lmax = std::max(lmax, v.real());
      lmin = std::min(lmin, v.real());
    }
    if (lmin < -nugget * std::max(lmax, 1.0)) {
      events_.push_back("circulant: M=" + std::to_string(m) + " not PSD (min eigenvalue " + format(lmin) +
                        ")");
      return false;
    }
    const double total = static_cast<double>(c.size());
    sqrt_eigen_.resize(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) sqrt_eigen_[k] = std::sqrt(std::max(c[k].real(), 0.0) / total);
    plan_ = std::move(plan);
    m_ = m;
    return true;
  }

  template <typename K>
  void build_cholesky(K& kernel, double nugget) {
    const auto size = static_cast<Eigen::Index>(grid_.size());
    Eigen::MatrixXd cov(size, size);
    for (Eigen::Index a = 0; a < size; ++a) {
      auto ia = grid_.unravel(std::size_t(a));
      for (Eigen::Index b = 0; b <= a; ++b) {
        auto ib = grid_.unravel(std::size_t(b));
        long d0 = ia[0] - ib[0], d1 = ia[1] - ib[1];
        cov(a, b) = cov(b, a) = kernel(d0 * d0 + d1 * d1);
      }
      cov(a, a) += nugget;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw NumericalError("cholesky: covariance not positive definite after nugget " + format(nugget));
    chol_ = llt.matrixL();
  }

  GridSpec grid_;
  std::shared_ptr<detail::FftPlan> plan_;
  std::vector<double> sqrt_eigen_;
  int m_ = 0;
  Eigen::MatrixXd chol_;
  std::vector<std::string> events_;
};

}  // namespace logchaos

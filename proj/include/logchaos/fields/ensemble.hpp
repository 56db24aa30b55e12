#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "logchaos/errors.hpp"
#include "logchaos/fields/circulant.hpp"
#include "logchaos/fields/cutoff.hpp"
#include "logchaos/fields/ladder.hpp"
#include "logchaos/fields/seed_covariance.hpp"
#include "logchaos/grid.hpp"
#include "logchaos/parallel.hpp"
#include "logchaos/rng.hpp"

namespace logchaos {

enum class SamplingScheme { cholesky, circulant_layers };

inline std::string to_string(SamplingScheme s) {
  return s == SamplingScheme::cholesky ? "cholesky" : "circulant-layers";
}

inline SamplingScheme parse_sampling_scheme(const std::string& s) {
  if (s == "cholesky") return SamplingScheme::cholesky;
  if (s == "circulant-layers") return SamplingScheme::circulant_layers;
  throw ConfigError("unknown sampling scheme '" + s + "'");
}

/// Generates S_eps at every ladder scale for one replica at a time.
///
/// Layer 0 is S_{eps_0}; layer j >= 1 is the independent increment
/// S_{eps_j} - S_{eps_{j-1}}.  Fields are running sums of the layers.  The
/// output of replica r depends only on (rng seed, r).
class CutoffFieldSampler {
 public:
  CutoffFieldSampler(const GridSpec& grid, const SeedCovariance& seed, const ScaleLadder& ladder,
                     SamplingScheme scheme = SamplingScheme::circulant_layers, int embedding_override = 0)
      : grid_(grid), seed_(seed), ladder_(ladder), scheme_(scheme) {
    if (seed.dim() != grid.dim()) throw ConfigError("seed covariance and grid dimensions differ");
    ladder.check_against(grid, false);
    LayerSamplerOptions opts;
    opts.force_cholesky = scheme == SamplingScheme::cholesky;
    opts.embedding_override = embedding_override;
    for (std::size_t j = 0; j < ladder.size(); ++j) {
      StationaryLayerSampler::Kernel cov;
      double support;
      if (j == 0) {
        double e = ladder[0];
        cov = [seed, e](double r) { return cutoff_covariance(seed, e, r); };
        support = 1.0;
      } else {
        double coarse = ladder[j - 1], fine = ladder[j];
        cov = [seed, coarse, fine](double r) { return layer_covariance(seed, coarse, fine, r); };
        support = coarse;
      }
      layers_.push_back(std::make_shared<StationaryLayerSampler>(grid, cov, support, opts));
      for (const auto& e : layers_.back()->events()) events_.push_back("layer " + std::to_string(j) + ": " + e);
    }
  }

  const GridSpec& grid() const { return grid_; }
  const SeedCovariance& seed_covariance() const { return seed_; }
  const ScaleLadder& ladder() const { return ladder_; }
  SamplingScheme scheme() const { return scheme_; }
  const std::vector<std::string>& events() const { return events_; }
  const StationaryLayerSampler& layer(std::size_t j) const { return *layers_.at(j); }

  /// Values per replica: ladder.size() * grid.size(), scale-major.
  std::size_t replica_size() const { return ladder_.size() * grid_.size(); }

  void sample(std::uint64_t rng_seed, std::uint64_t replica, std::span<double> out) const {
    if (out.size() != replica_size()) throw PreconditionError("sampler: output size mismatch");
    ReplicaStream rng(rng_seed, replica, StreamPurpose::cutoff_field);
    const std::size_t np = grid_.size();
    std::vector<double> acc(np, 0.0);
    for (std::size_t j = 0; j < layers_.size(); ++j) {
      layers_[j]->add_sample(rng, acc.data());
      std::copy(acc.begin(), acc.end(), out.begin() + j * np);
    }
  }

  std::vector<double> sample(std::uint64_t rng_seed, std::uint64_t replica) const {
    std::vector<double> out(replica_size());
    sample(rng_seed, replica, out);
    return out;
  }

 private:
  GridSpec grid_;
  SeedCovariance seed_;
  ScaleLadder ladder_;
  SamplingScheme scheme_;
  std::vector<std::shared_ptr<StationaryLayerSampler>> layers_;
  std::vector<std::string> events_;
};

/// Replicated joint samples of S_eps across a ladder.  Storage is
/// replica-major, scale-major, point-major.
struct FieldEnsemble {
  GridSpec grid;
  SeedCovariance seed_covariance{1, SeedProfile::triangle};
  ScaleLadder ladder;
  std::size_t replicas = 0;
  std::uint64_t rng_seed = 0;
  SamplingScheme scheme = SamplingScheme::circulant_layers;
  std::vector<std::string> events;
  std::vector<double> values;

  std::size_t scale_index(double eps) const { return ladder.index_of(eps); }

  std::span<const double> field(std::size_t r, std::size_t j) const {
    const std::size_t np = grid.size();
    return {values.data() + (r * ladder.size() + j) * np, np};
  }

  double at(std::size_t r, std::size_t j, std::size_t point) const { return field(r, j)[point]; }
};

inline FieldEnsemble sample_cutoff_ensemble(const GridSpec& grid, const SeedCovariance& seed,
                                            const ScaleLadder& ladder, std::size_t replicas,
                                            std::uint64_t rng_seed,
                                            SamplingScheme scheme = SamplingScheme::circulant_layers,
                                            unsigned jobs = 1, int embedding_override = 0) {
  if (replicas < 1) throw ConfigError("ensemble: need at least one replica");
  CutoffFieldSampler sampler(grid, seed, ladder, scheme, embedding_override);
  FieldEnsemble ens{grid, seed, ladder, replicas, rng_seed, scheme, sampler.events(), {}};
  const std::size_t block = sampler.replica_size();
  ens.values.resize(block * replicas);
  parallel_for(replicas, jobs, [&](std::size_t r) {
    sampler.sample(rng_seed, r, std::span<double>(ens.values.data() + r * block, block));
  });
  return ens;
}

namespace detail {

// Grid index of x + eps*u, requiring eps*u to be an exact multiple of h.
inline std::size_t shifted_index(const GridSpec& grid, std::size_t x, double eps, const Offset& u) {
  const double h = grid.spacing();
  auto ij = grid.unravel(x);
  int shifted[2] = {ij[0], ij[1]};
  for (int a = 0; a < grid.dim(); ++a) {
    double steps = eps * u[a] / h;
    double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9)
      throw ConfigError("offset eps*u is not a multiple of the grid spacing (no interpolation)");
    shifted[a] += static_cast<int>(rounded);
    if (shifted[a] < 0 || shifted[a] >= grid.points_per_axis())
      throw PreconditionError("x + eps*u lies outside the grid");
  }
  if (grid.dim() == 1 && u[1] != 0.0) throw ConfigError("second offset component given for d=1");
  return grid.ravel(shifted[0], shifted[1]);
}

}  // namespace detail

/// Process values per replica, row-major (replica, offset).
struct ProcessSamples {
  std::size_t replicas = 0;
  std::size_t offsets = 0;
  std::vector<double> values;
  double operator()(std::size_t r, std::size_t k) const { return values[r * offsets + k]; }
};

/// Y_{eps,x}(u) = S_eps(x + eps u) - S_eps(x).
inline ProcessSamples extract_Y(const FieldEnsemble& ens, double eps, std::size_t x,
                                const std::vector<Offset>& u) {
  const std::size_t j = ens.scale_index(eps);
  std::vector<std::size_t> idx;
  for (const auto& o : u) idx.push_back(detail::shifted_index(ens.grid, x, eps, o));
  ProcessSamples out{ens.replicas, u.size(), std::vector<double>(ens.replicas * u.size())};
  for (std::size_t r = 0; r < ens.replicas; ++r) {
    auto f = ens.field(r, j);
    for (std::size_t k = 0; k < idx.size(); ++k) out.values[r * u.size() + k] = f[idx[k]] - f[x];
  }
  return out;
}

/// Z_{(eps,delta,x)}(u) = S_delta(x + eps u) - S_eps(x + eps u), delta < eps.
inline ProcessSamples extract_Z(const FieldEnsemble& ens, double eps, double delta, std::size_t x,
                                const std::vector<Offset>& u) {
  if (!(delta < eps)) throw PreconditionError("extract_Z: need delta < eps");
  const std::size_t je = ens.scale_index(eps);
  const std::size_t jd = ens.scale_index(delta);
  std::vector<std::size_t> idx;
  for (const auto& o : u) idx.push_back(detail::shifted_index(ens.grid, x, eps, o));
  ProcessSamples out{ens.replicas, u.size(), std::vector<double>(ens.replicas * u.size())};
  for (std::size_t r = 0; r < ens.replicas; ++r) {
    auto fe = ens.field(r, je);
    auto fd = ens.field(r, jd);
    for (std::size_t k = 0; k < idx.size(); ++k) out.values[r * u.size() + k] = fd[idx[k]] - fe[idx[k]];
  }
  return out;
}

}  // namespace logchaos

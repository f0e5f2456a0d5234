#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "entwit/types.hpp"

namespace entwit {

/// Deterministic random-number helpers.  The engine is std::mt19937_64; the
/// variate transforms are written out explicitly (rather than using
/// std::*_distribution) so that identical seeds give identical streams on
/// every standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Derives an independent child generator from (seed, task index) so that
  /// per-restart or per-sample work is reproducible regardless of schedule.
  static Rng derive(std::uint64_t seed, std::uint64_t task_index) {
    // SplitMix64 finalizer over the combined words; decorrelates nearby
    // (seed, index) pairs.
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (task_index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return Rng(z);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  Real uniform() {
    return static_cast<Real>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal variate via Box-Muller (one value per call; the
  /// companion value is cached).
  Real normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    Real u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const Real u2 = uniform();
    const Real r = std::sqrt(-2.0 * std::log(u1));
    const Real theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Complex complex_normal() {
    const Real re = normal();
    const Real im = normal();
    return Complex(re, im);
  }

  /// Haar-like random unit vector: complex-normal entries, normalized.
  ComplexVector unit_vector(Index d) {
    ComplexVector v(d);
    for (Index i = 0; i < d; ++i) v(i) = complex_normal();
    const Real n = v.norm();
    if (n == 0.0) return unit_vector(d);
    return v / n;
  }

  /// Random Hermitian matrix with independent complex-normal off-diagonal
  /// entries and real-normal diagonal (GUE-like scaling is irrelevant here).
  ComplexMatrix hermitian(Index d) {
    ComplexMatrix m(d, d);
    for (Index i = 0; i < d; ++i) {
      m(i, i) = Complex(normal(), 0.0);
      for (Index j = i + 1; j < d; ++j) {
        m(i, j) = complex_normal();
        m(j, i) = std::conj(m(i, j));
      }
    }
    return m;
  }

  /// Random real symmetric matrix.
  RealMatrix symmetric(Index d) {
    RealMatrix m(d, d);
    for (Index i = 0; i < d; ++i) {
      m(i, i) = normal();
      for (Index j = i + 1; j < d; ++j) {
        m(i, j) = normal();
        m(j, i) = m(i, j);
      }
    }
    return m;
  }

  /// Dirichlet(1, ..., 1) weights: k exponential draws, normalized.
  RealVector dirichlet_uniform(Index k) {
    RealVector w(k);
    for (Index i = 0; i < k; ++i) {
      Real u = uniform();
      while (u <= 0.0) u = uniform();
      w(i) = -std::log(u);
    }
    return w / w.sum();
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  Real spare_ = 0.0;
};

}  // namespace entwit

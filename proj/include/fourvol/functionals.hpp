#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fourvol/spectrum.hpp"
#include "fourvol/spot.hpp"

namespace fourvol {

enum class FunctionalKind { power, inverse, log, trace, entry, eigenvalue, beta };

/// A smooth functional g on symmetric matrices with its entrywise gradient.
/// Inputs are symmetrized before evaluation, so grad(c)(j,k) is the
/// derivative with respect to c_jk alone.
class FunctionalSpec {
 public:
  /// tr(S^p)
  static FunctionalSpec power(double p);
  /// tr(S^{-1})
  static FunctionalSpec inverse();
  /// log det S
  static FunctionalSpec log();
  static FunctionalSpec trace();
  /// S_jk, zero-based indices.
  static FunctionalSpec entry(int j, int k);
  /// r-th largest eigenvalue, r >= 1.
  static FunctionalSpec eigenvalue(int r);
  /// S_jk / S_kk, zero-based indices.
  static FunctionalSpec beta(int j, int k);

  /// CLI ids: power:2, inverse, log, trace, entry:1,2, eig:1, beta:1,2
  /// (one-based indices). Throws ConfigError on anything else.
  static FunctionalSpec parse(const std::string& id);

  std::string id() const;
  FunctionalKind kind() const { return kind_; }

  /// Throws DomainError outside the domain (singular input for log or
  /// inverse, negative eigenvalue for fractional powers).
  double eval(const Eigen::MatrixXd& c) const;
  Eigen::MatrixXd grad(const Eigen::MatrixXd& c) const;

  /// Throws ConfigError if the functional needs indices beyond d.
  void check_dimension(int d) const;

 private:
  FunctionalSpec(FunctionalKind kind, double p, int j, int k)
      : kind_(kind), p_(p), j_(j), k_(k) {}

  FunctionalKind kind_;
  double p_;
  int j_;
  int k_;
};

/// N, M, B, L and the constants of the rate rules.
struct TuningParams {
  int N = 0;
  int M = 0;
  std::size_t B = 0;
  std::size_t L = 0;
  double kappa = 0.0;
  double alpha_holder = 0.5;
};

struct TuningCheck {
  std::vector<std::string> advisories;
};

/// Hard constraints throw TuningError (frequency availability) or
/// ConfigError (grid sizes); soft rate conditions become advisories.
TuningCheck validate_tuning(const TuningParams& tp, std::size_t n_min, bool periodic);

/// ceil(B/M) when not periodic, else 0.
std::size_t default_L(std::size_t B, int M, bool periodic);

/// sum_{i=first}^{last} g(values[i]) * weights[i]. A domain error is
/// rethrown as EstimationError naming times[i].
double weighted_functional_sum(const std::vector<Eigen::MatrixXd>& values,
                               const std::vector<double>& weights,
                               const std::vector<double>& times, const FunctionalSpec& g,
                               std::size_t first, std::size_t last);

/// sum_{h=1+L}^{B-L} g(c(t_h)) T/B, with h = B read as h = 0.
double plug_in_estimate(const SpotPath& path, const FunctionalSpec& g, std::size_t L);

/// sum_{h=1+L}^{n-L} g(c_jj(tau_h)) (tau_h - tau_{h-1}) on asset j's own
/// times, the series evaluated directly at each tau_h. g acts on 1x1 input.
double univariate_plug_in(const SpectrumEstimate& spec, int M, const ObservationGrid& grid,
                          int j, const FunctionalSpec& g, std::size_t L);

}  // namespace fourvol

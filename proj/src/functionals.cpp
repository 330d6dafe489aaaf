#include "fourvol/functionals.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "fourvol/error.hpp"

namespace fourvol {
namespace {

Eigen::MatrixXd sym(const Eigen::MatrixXd& c) { return 0.5 * (c + c.transpose()); }

struct Spectral {
  Eigen::VectorXd lam;  // ascending
  Eigen::MatrixXd vec;
};

Spectral decompose(const Eigen::MatrixXd& S) {
  if (S.rows() == 1) return {Eigen::VectorXd::Constant(1, S(0, 0)), Eigen::MatrixXd::Ones(1, 1)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::MatrixXd reassemble(const Spectral& sp, const Eigen::VectorXd& f) {
  return sp.vec * f.asDiagonal() * sp.vec.transpose();
}

void require_positive(const Spectral& sp, const char* what) {
  const double m = sp.lam.minCoeff();
  if (!(m > 0.0))
    throw DomainError(std::string(what) + " needs a positive definite matrix (min eigenvalue " +
                          std::to_string(m) + ")",
                      m);
}

bool is_integer(double p) { return p == std::round(p); }

std::vector<int> parse_indices(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      throw ConfigError("bad functional index '" + tok + "'");
    }
    if (pos != tok.size() || v < 1) throw ConfigError("bad functional index '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

FunctionalSpec FunctionalSpec::power(double p) { return {FunctionalKind::power, p, 0, 0}; }
FunctionalSpec FunctionalSpec::inverse() { return {FunctionalKind::inverse, 0, 0, 0}; }
FunctionalSpec FunctionalSpec::log() { return {FunctionalKind::log, 0, 0, 0}; }
FunctionalSpec FunctionalSpec::trace() { return {FunctionalKind::trace, 0, 0, 0}; }
FunctionalSpec FunctionalSpec::entry(int j, int k) { return {FunctionalKind::entry, 0, j, k}; }
FunctionalSpec FunctionalSpec::eigenvalue(int r) {
  if (r < 1) throw ConfigError("eigenvalue rank must be >= 1");
  return {FunctionalKind::eigenvalue, 0, r, 0};
}
FunctionalSpec FunctionalSpec::beta(int j, int k) { return {FunctionalKind::beta, 0, j, k}; }

FunctionalSpec FunctionalSpec::parse(const std::string& id) {
  const auto colon = id.find(':');
  const std::string name = id.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : id.substr(colon + 1);
  auto need_no_arg = [&] {
    if (colon != std::string::npos) throw ConfigError("functional '" + name + "' takes no argument");
  };
  if (name == "power") {
    std::size_t pos = 0;
    double p = 0;
    try {
      p = std::stod(arg, &pos);
    } catch (const std::exception&) {
      throw ConfigError("bad power exponent in '" + id + "'");
    }
    if (pos != arg.size() || !std::isfinite(p)) throw ConfigError("bad power exponent in '" + id + "'");
    return power(p);
  }
  if (name == "inverse") return need_no_arg(), inverse();
  if (name == "log") return need_no_arg(), log();
  if (name == "trace") return need_no_arg(), trace();
  if (name == "entry" || name == "beta") {
    const auto idx = parse_indices(arg);
    if (idx.size() != 2) throw ConfigError("'" + name + "' needs two indices, e.g. " + name + ":1,2");
    return name == "entry" ? entry(idx[0] - 1, idx[1] - 1) : beta(idx[0] - 1, idx[1] - 1);
  }
  if (name == "eig") {
    const auto idx = parse_indices(arg);
    if (idx.size() != 1) throw ConfigError("'eig' needs one rank, e.g. eig:1");
    return eigenvalue(idx[0]);
  }
  throw ConfigError("unknown functional '" + id + "'");
}

std::string FunctionalSpec::id() const {
  switch (kind_) {
    case FunctionalKind::power: {
      std::ostringstream os;
      os << "power:" << p_;
      return os.str();
    }
    case FunctionalKind::inverse: return "inverse";
    case FunctionalKind::log: return "log";
    case FunctionalKind::trace: return "trace";
    case FunctionalKind::entry: return "entry:" + std::to_string(j_ + 1) + "," + std::to_string(k_ + 1);
    case FunctionalKind::eigenvalue: return "eig:" + std::to_string(j_);
    case FunctionalKind::beta: return "beta:" + std::to_string(j_ + 1) + "," + std::to_string(k_ + 1);
  }
  return "";
}

void FunctionalSpec::check_dimension(int d) const {
  switch (kind_) {
    case FunctionalKind::entry:
    case FunctionalKind::beta:
      if (j_ < 0 || k_ < 0 || j_ >= d || k_ >= d)
        throw ConfigError("functional " + id() + " indexes beyond dimension " + std::to_string(d));
      break;
    case FunctionalKind::eigenvalue:
      if (j_ > d) throw ConfigError("functional " + id() + " ranks beyond dimension " + std::to_string(d));
      break;
    default:
      break;
  }
}

double FunctionalSpec::eval(const Eigen::MatrixXd& c) const {
  const Eigen::MatrixXd S = sym(c);
  switch (kind_) {
    case FunctionalKind::trace: return S.trace();
    case FunctionalKind::entry: return S(j_, k_);
    case FunctionalKind::beta: {
      if (S(k_, k_) == 0.0) throw DomainError("beta needs a non-zero variance", S(k_, k_));
      return S(j_, k_) / S(k_, k_);
    }
    default: break;
  }
  const Spectral sp = decompose(S);
  switch (kind_) {
    case FunctionalKind::power: {
      if (p_ == 0.0) return static_cast<double>(S.rows());
      if (!is_integer(p_) || p_ < 0) {
        if (p_ < 0) require_positive(sp, "negative power");
        else if (sp.lam.minCoeff() < 0.0)
          throw DomainError("fractional power needs a PSD matrix", sp.lam.minCoeff());
      }
      double acc = 0.0;
      for (double l : sp.lam) acc += std::pow(l, p_);
      return acc;
    }
    case FunctionalKind::inverse: {
      require_positive(sp, "inverse");
      return sp.lam.cwiseInverse().sum();
    }
    case FunctionalKind::log: {
      require_positive(sp, "log");
      return sp.lam.array().log().sum();
    }
    case FunctionalKind::eigenvalue: return sp.lam(sp.lam.size() - j_);
    default: break;
  }
  return 0.0;
}

Eigen::MatrixXd FunctionalSpec::grad(const Eigen::MatrixXd& c) const {
  const Eigen::Index d = c.rows();
  const Eigen::MatrixXd S = sym(c);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, d);
  switch (kind_) {
    case FunctionalKind::trace: return Eigen::MatrixXd::Identity(d, d);
    case FunctionalKind::entry:
      G(j_, k_) += 0.5;
      G(k_, j_) += 0.5;
      return G;
    case FunctionalKind::beta: {
      if (j_ == k_) return G;
      const double s = S(k_, k_);
      if (s == 0.0) throw DomainError("beta needs a non-zero variance", s);
      G(j_, k_) = 0.5 / s;
      G(k_, j_) = 0.5 / s;
      G(k_, k_) = -S(j_, k_) / (s * s);
      return G;
    }
    default: break;
  }
  const Spectral sp = decompose(S);
  Eigen::VectorXd f(sp.lam.size());
  switch (kind_) {
    case FunctionalKind::power: {
      if (p_ == 0.0) return G;
      if (!is_integer(p_) || p_ < 0) {
        if (p_ < 0) require_positive(sp, "negative power");
        else if (sp.lam.minCoeff() < 0.0)
          throw DomainError("fractional power needs a PSD matrix", sp.lam.minCoeff());
      }
      for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = p_ * std::pow(sp.lam(i), p_ - 1.0);
      return reassemble(sp, f);
    }
    case FunctionalKind::inverse:
      require_positive(sp, "inverse");
      f = -sp.lam.array().square().inverse();
      return reassemble(sp, f);
    case FunctionalKind::log:
      require_positive(sp, "log");
      f = sp.lam.cwiseInverse();
      return reassemble(sp, f);
    case FunctionalKind::eigenvalue: {
      const Eigen::VectorXd v = sp.vec.col(sp.lam.size() - j_);
      return v * v.transpose();
    }
    default: break;
  }
  return G;
}

TuningCheck validate_tuning(const TuningParams& tp, std::size_t n_min, bool periodic) {
  TuningCheck out;
  if (tp.N < 1) throw ConfigError("N must be >= 1");
  if (tp.M < 2) throw ConfigError("M must be >= 2");
  if (tp.B < 2 * static_cast<std::size_t>(tp.M) - 1)
    throw ConfigError("B=" + std::to_string(tp.B) + " must be >= 2M-1=" + std::to_string(2 * tp.M - 1));
  if (2 * tp.L >= tp.B) throw ConfigError("L must be < B/2");
  const long cap = static_cast<long>(n_min / 2) - tp.M + 1;
  if (tp.N > cap)
    throw TuningError("N=" + std::to_string(tp.N) + " violates N <= floor(n/2) - M + 1 = " +
                      std::to_string(cap) + " (n=" + std::to_string(n_min) +
                      ", M=" + std::to_string(tp.M) + "); lower N or M");
  const double N = tp.N;
  const double alpha = tp.alpha_holder > 0 ? tp.alpha_holder : 0.5;
  if (!(tp.M > std::pow(N, 1.0 / (1.0 + 2.0 * alpha))))
    out.advisories.push_back("M is not above N^(1/(1+2 alpha)); smoothing bias may dominate");
  if (!(tp.M < std::sqrt(N)))
    out.advisories.push_back("M is not below N^(1/2); spot variance may dominate");
  if (!(static_cast<double>(tp.B) > std::sqrt(N)))
    out.advisories.push_back("B is not above N^(1/2); Riemann error may dominate");
  if (periodic && tp.L != 0) out.advisories.push_back("periodic data normally uses L = 0");
  if (!periodic && tp.L == 0) out.advisories.push_back("non-periodic data normally uses L ~ B/M");
  return out;
}

std::size_t default_L(std::size_t B, int M, bool periodic) {
  if (periodic) return 0;
  return (B + static_cast<std::size_t>(M) - 1) / static_cast<std::size_t>(M);
}

double weighted_functional_sum(const std::vector<Eigen::MatrixXd>& values,
                               const std::vector<double>& weights,
                               const std::vector<double>& times, const FunctionalSpec& g,
                               std::size_t first, std::size_t last) {
  double acc = 0.0;
  for (std::size_t i = first; i <= last && i < values.size(); ++i) {
    try {
      acc += g.eval(values[i]) * weights[i];
    } catch (const DomainError& e) {
      throw EstimationError("functional " + g.id() + " failed at t=" + std::to_string(times[i]) +
                            ": " + e.what());
    }
  }
  return acc;
}

double plug_in_estimate(const SpotPath& path, const FunctionalSpec& g, std::size_t L) {
  const std::size_t B = path.B;
  if (2 * L >= B) throw ConfigError("L must be < B/2");
  // h = 1..B with h = B folded onto index 0, so index order is 1..B-1, 0.
  std::vector<Eigen::MatrixXd> vals;
  std::vector<double> w, t;
  vals.reserve(B);
  for (std::size_t h = 1 + L; h <= B - L; ++h) {
    vals.push_back(path.at(static_cast<long>(h)));
    w.push_back(path.T / static_cast<double>(B));
    t.push_back(path.T * static_cast<double>(h) / static_cast<double>(B));
  }
  if (vals.empty()) return 0.0;
  return weighted_functional_sum(vals, w, t, g, 0, vals.size() - 1);
}

double univariate_plug_in(const SpectrumEstimate& spec, int M, const ObservationGrid& grid, int j,
                          const FunctionalSpec& g, std::size_t L) {
  const auto& tau = grid.times();
  const std::size_t n = grid.n();
  if (2 * L >= n) throw ConfigError("L must be < n/2");
  std::vector<Eigen::MatrixXd> vals;
  std::vector<double> w, t;
  for (std::size_t h = 1 + L; h <= n - L; ++h) {
    const double c = fejer_series_at(spec, M, tau[h])(j, j).real();
    vals.push_back(condition_matrix(Eigen::MatrixXd::Constant(1, 1, c)));
    w.push_back(tau[h] - tau[h - 1]);
    t.push_back(tau[h]);
  }
  if (vals.empty()) return 0.0;
  return weighted_functional_sum(vals, w, t, g, 0, vals.size() - 1);
}

}  // namespace fourvol

#include "corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace orps::testing {

namespace {

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

// A 1x1 skew matrix is zero; leave it so.
Matrix unit_norm(Matrix m) {
  const double nm = opnorm2(m);
  return nm > 0.0 ? Matrix(m / nm) : m;
}

Matrix skew(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix r = random_matrix(rng, n, n);
  return unit_norm(r - r.transpose());
}

Matrix poly(const Matrix& S, const std::vector<double>& coeff) {
  Matrix out = Matrix::Zero(S.rows(), S.cols());
  Matrix power = Matrix::Identity(S.rows(), S.cols());
  for (double c : coeff) {
    out += c * power;
    power = power * S;
  }
  return out;
}

double target_gamma(std::mt19937_64& rng, GrowthSign sign) {
  switch (sign) {
    case GrowthSign::negative: return uniform(rng, -1.5, -0.1);
    case GrowthSign::zero: return 0.0;
    case GrowthSign::positive: return uniform(rng, 0.1, 1.2);
  }
  return 0.0;
}

std::vector<double> impulse_times(std::mt19937_64& rng, int m, double omega) {
  for (;;) {
    std::vector<double> t(static_cast<std::size_t>(m));
    for (auto& x : t) x = uniform(rng, 0.05, 0.95) * omega;
    std::sort(t.begin(), t.end());
    bool ok = true;
    for (int k = 1; k < m; ++k) ok = ok && t[k] - t[k - 1] > 0.05 * omega;
    if (ok) return t;
  }
}

RandomSystem finish(std::mt19937_64& rng, const CorpusOptions& opt, Matrix A, const std::vector<Matrix>& Bs) {
  const Eigen::Index n = A.rows();
  const double c = uniform(rng, 0.5, 3.0);
  const std::vector<double> taus = impulse_times(rng, opt.m, opt.omega);
  std::vector<Impulse> imps;
  for (int k = 0; k < opt.m; ++k) imps.push_back({taus[static_cast<std::size_t>(k)], Bs[static_cast<std::size_t>(k)], random_vector(rng, n), std::nullopt});
  RandomSystem r;
  r.c = c;
  r.v0 = random_vector(rng, n);
  r.v1 = random_vector(rng, n, 0.5);
  r.v2 = random_vector(rng, n, 0.5);
  ForcingFn f;
  if (opt.forcing) f = geometric_forcing(c, opt.omega, r.v0, r.v1, r.v2);
  r.sys = make_linear_system(std::move(A), ImpulseSchedule(opt.omega, c * Matrix::Identity(n, n), std::move(imps)), f);
  return r;
}

bool gap_ok(const SystemSpec& sys) {
  try {
    return PeriodicKernel(sys).gap_condition() < 1e6;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = normal(rng);
  return m;
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

RandomSystem commuting_system(std::mt19937_64& rng, const CorpusOptions& opt) {
  const Eigen::Index n = opt.n;
  for (;;) {
    Matrix S, A;
    if (opt.sign == GrowthSign::zero) {
      S = skew(rng, n);
      A = poly(S, {0.0, uniform(rng, -2.0, 2.0), 0.0, uniform(rng, -0.5, 0.5)});
    } else {
      S = unit_norm(random_matrix(rng, n, n));
      A = poly(S, {0.0, uniform(rng, -1.5, 1.5), uniform(rng, -0.5, 0.5)});
      A.diagonal().array() += target_gamma(rng, opt.sign) - logarithmic_norm(A);
    }
    std::vector<Matrix> Bs;
    for (int k = 0; k < opt.m; ++k) Bs.push_back(poly(S, {uniform(rng, -0.4, 0.4), uniform(rng, -0.3, 0.3), uniform(rng, -0.2, 0.2)}));
    RandomSystem r = finish(rng, opt, std::move(A), Bs);
    if (gap_ok(r.sys)) return r;
  }
}

RandomSystem general_system(std::mt19937_64& rng, const CorpusOptions& opt) {
  const Eigen::Index n = std::max(opt.n, 3);
  const Eigen::Index k = 2;  // block whose impulse matrices do not commute
  const Eigen::Index rest = n - k;
  for (;;) {
    Matrix Ap;
    double a = 0.0;
    if (opt.sign == GrowthSign::zero) {
      Ap = poly(skew(rng, rest), {0.0, uniform(rng, -2.0, 2.0)});
    } else {
      Ap = poly(unit_norm(random_matrix(rng, rest, rest)), {0.0, uniform(rng, -1.5, 1.5)});
      const double g = target_gamma(rng, opt.sign);
      Ap.diagonal().array() += g - logarithmic_norm(Ap);
      a = g - uniform(rng, 0.0, 0.5);
      if (opt.sign == GrowthSign::positive) a = std::max(a, 0.05);
    }
    Matrix A = Matrix::Zero(n, n);
    A.topLeftCorner(k, k) = a * Matrix::Identity(k, k);
    A.bottomRightCorner(rest, rest) = Ap;
    std::vector<Matrix> Bs;
    for (int j = 0; j < opt.m; ++j) {
      Matrix B = Matrix::Zero(n, n);
      B.topLeftCorner(k, k) = random_matrix(rng, k, k, 0.3);
      B.bottomRightCorner(rest, rest) = poly(Ap, {uniform(rng, -0.3, 0.3), uniform(rng, -0.2, 0.2)});
      Bs.push_back(std::move(B));
    }
    RandomSystem r = finish(rng, opt, std::move(A), Bs);
    if (gap_ok(r.sys)) return r;
  }
}

ForcingFn geometric_forcing(double c, double omega, Vector v0, Vector v1, Vector v2) {
  return [=](double t) {
    const double th = 2.0 * std::numbers::pi * t / omega;
    return Vector(std::pow(c, t / omega) * (v0 + std::cos(th) * v1 + std::sin(th) * v2));
  };
}

double geometric_forcing_bound(const RandomSystem& r) {
  return std::max(1.0, r.c) * (r.v0.norm() + r.v1.norm() + r.v2.norm());
}

SystemSpec softabs_system(std::mt19937_64& rng, const RandomSystem& base, double eps, double eps_z, double delta) {
  const Eigen::Index n = base.sys.dim();
  const double c = base.c, w = base.sys.omega();
  delta *= 1.0 + solve_linear_periodic(base.sys).sup_norm();
  const Matrix W = unit_norm(random_matrix(rng, n, n));
  const ForcingFn phi = geometric_forcing(c, w, base.v0, base.v1, base.v2);
  auto softabs = [delta, c, w](const Vector& v, double t) {
    const double floor = delta * std::pow(c, t / w);
    return Vector((v.array().square() + floor * floor).sqrt());
  };
  VolterraProblem p;
  p.f = [=](double t, const Vector& y, const Vector& z) {
    Vector out = phi(t) + eps * (W * softabs(y, t));
    if (eps_z != 0.0) out += eps_z * softabs(z, t);
    return out;
  };
  if (eps_z != 0.0) p.g = [w](double, double s, const Vector& y) { return Vector(std::cos(2.0 * std::numbers::pi * s / w) * y); };
  p.lipschitz_f = std::max(eps, eps_z);
  p.lipschitz_g = eps_z != 0.0 ? 1.0 : 0.0;
  p.growth_alpha = geometric_forcing_bound(base) + (eps + eps_z) * delta * std::sqrt(double(n)) * std::max(1.0, c);
  p.growth_beta = eps + eps_z * w / (2.0 * std::numbers::pi);
  return make_semilinear_system(base.sys.A, base.sys.schedule, std::move(p));
}

double general_C2(const SystemSpec& sys) {
  return bound_general(sys, estimate_growth(sys.A, sys.omega(), 256)).C2;
}

}  // namespace orps::testing

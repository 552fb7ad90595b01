#pragma once
// Seeded random systems for the tests.
//
// Commuting families: A and every B_k are polynomials in one matrix S, so all
// data commute; rho = c I. General families: A = blockdiag(a I_k, A'),
// B_k = blockdiag(R_k, p_k(A')) with random R_k, so A commutes with each B_k
// but the B_k do not commute with each other.

#include "orps/solver.hpp"

#include <random>

namespace orps::testing {

enum class GrowthSign { negative, zero, positive };

struct CorpusOptions {
  int n = 3;
  int m = 2;
  GrowthSign sign = GrowthSign::negative;
  double omega = 1.0;
  bool forcing = true;  // linear forcing c^{t/omega} (v0 + v1 cos + v2 sin)
};

/// Owns the system so kernels can keep a reference to it.
struct RandomSystem {
  SystemSpec sys;
  double c = 1.0;          // rho = c I
  Vector v0, v1, v2;       // forcing coefficients
};

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0);
Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0);

/// mu(A) is shifted into [-1.5, -0.1], exactly 0 (skew A), or [0.1, 1.2].
RandomSystem commuting_system(std::mt19937_64& rng, const CorpusOptions& opt);
RandomSystem general_system(std::mt19937_64& rng, const CorpusOptions& opt);

/// Forcing c^{t/omega} (v0 + v1 cos(2 pi t/omega) + v2 sin(2 pi t/omega)).
ForcingFn geometric_forcing(double c, double omega, Vector v0, Vector v1, Vector v2);
/// max(1, c) (|v0| + |v1| + |v2|), a bound for the forcing on [0, omega].
double geometric_forcing_bound(const RandomSystem& r);

/// f = phi(t) + eps W softabs(y) + eps_z softabs(z), g = cos(2 pi s/omega) y,
/// softabs(v) = sqrt(v^2 + delta^2 c^{2t/omega}) componentwise, ||W|| = 1,
/// phi the forcing of `base`. Compatible with rho = c I; Lipschitz constants
/// and growth constants (alpha, beta) are attached. delta is taken relative to
/// 1 + sup of the linear periodic solution, so the rounded corner stays wide
/// on the scale of the solution.
SystemSpec softabs_system(std::mt19937_64& rng, const RandomSystem& base, double eps, double eps_z,
                          double delta = 0.25);

/// C2 of the general bound for the linear part of sys.
double general_C2(const SystemSpec& sys);

}  // namespace orps::testing

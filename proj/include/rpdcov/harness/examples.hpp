#pragma once

// Synthetic data laws used in the simulation study. Every generator is
// deterministic in ExampleSpec::seed.
//
//   1  X ~ Unif(0,1)^p, Y_i = Z_i^2 with Z ~ Unif(0,1)^q independent
//   2  as 1, but Y_1 = X_1^2 and Y_2 = X_2^2
//   3  as 1 with arbitrary p, q
//   4  Unif X; Y_i = X_i^2 for i <= 5, Y_i = Z_i^2 otherwise
//   5  jointly normal, Cor(X_i, Y_i) = rho for i <= min(p, q)
//   6  X ~ N(0, I_p), Y_i = log(X_i^2) + N(0, sigma^2), q <= p
//   7  as 6 with sigma = 1, but the first floor(t_frac n) rows use an
//      independent Z in place of X

#include "rpdcov/types.hpp"

#include <cstdint>
#include <string>

namespace rpdcov::harness {

struct ExampleSpec {
  int id = 1;
  Eigen::Index n = 100;
  Eigen::Index p = 10;
  Eigen::Index q = 10;
  double rho = 0.0;
  double sigma = 1.0;
  double t_frac = 0.5;
  std::uint64_t seed = 0;

  // Throws DomainError / DimensionError / SizeError on an invalid spec.
  void validate() const;
};

struct PairedSample {
  MatrixXd X;
  MatrixXd Y;
};

PairedSample generate_example(const ExampleSpec& spec);

// Number of leading rows of example 7 drawn without dependence.
Eigen::Index example7_split(const ExampleSpec& spec);

std::string describe(const ExampleSpec& spec);

}  // namespace rpdcov::harness

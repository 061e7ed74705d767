#include "rpdcov/harness/examples.hpp"

#include "rpdcov/random.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace rpdcov::harness {

void ExampleSpec::validate() const {
  if (id < 1 || id > 7) throw DomainError("example id must be in 1..7, got " + std::to_string(id));
  if (n < 1) throw SizeError("example: n must be >= 1");
  if (p < 1 || q < 1) throw DimensionError("example: p and q must be >= 1");
  if (id == 2 && (p < 2 || q < 2)) throw DimensionError("example 2: needs p >= 2 and q >= 2");
  if (id == 4 && (p < 5 || q < 5)) throw DimensionError("example 4: needs p >= 5 and q >= 5");
  if (id == 5 && !(rho >= -1.0 && rho <= 1.0)) throw DomainError("example 5: rho must lie in [-1, 1]");
  if ((id == 6 || id == 7) && q > p) throw DimensionError("examples 6 and 7: need q <= p");
  if (id == 6 && !(sigma >= 0.0 && std::isfinite(sigma))) throw DomainError("example 6: sigma must be >= 0");
  if (id == 7 && !(t_frac > 0.0 && t_frac < 1.0)) throw DomainError("example 7: t_frac must lie in (0, 1)");
}

Eigen::Index example7_split(const ExampleSpec& spec) {
  return static_cast<Eigen::Index>(std::floor(spec.t_frac * static_cast<double>(spec.n)));
}

PairedSample generate_example(const ExampleSpec& spec) {
  spec.validate();
  Engine engine = make_engine(RngSeed{spec.seed, 0});
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const Eigen::Index n = spec.n, p = spec.p, q = spec.q;
  PairedSample s{MatrixXd(n, p), MatrixXd(n, q)};
  auto& X = s.X;
  auto& Y = s.Y;

  switch (spec.id) {
    case 1:
    case 2:
    case 3:
    case 4: {
      const Eigen::Index linked = spec.id == 2 ? 2 : (spec.id == 4 ? 5 : 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = unif(engine);
        for (Eigen::Index j = 0; j < q; ++j) {
          const double z = j < linked ? X(i, j) : unif(engine);
          Y(i, j) = z * z;
        }
      }
      break;
    }
    case 5: {
      const double c = std::sqrt(std::max(0.0, 1.0 - spec.rho * spec.rho));
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = normal(engine);
        for (Eigen::Index j = 0; j < q; ++j) {
          const double e = normal(engine);
          Y(i, j) = j < p ? spec.rho * X(i, j) + c * e : e;
        }
      }
      break;
    }
    case 6:
    case 7: {
      const Eigen::Index split = spec.id == 7 ? example7_split(spec) : 0;
      const double sigma = spec.id == 7 ? 1.0 : spec.sigma;
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = normal(engine);
        for (Eigen::Index j = 0; j < q; ++j) {
          const double z = i < split ? normal(engine) : X(i, j);
          Y(i, j) = std::log(z * z) + sigma * normal(engine);
        }
      }
      break;
    }
  }
  return s;
}

std::string describe(const ExampleSpec& spec) {
  std::ostringstream o;
  o << "ex" << spec.id << " n=" << spec.n << " p=" << spec.p << " q=" << spec.q;
  if (spec.id == 5) o << " rho=" << spec.rho;
  if (spec.id == 6) o << " sigma=" << spec.sigma;
  if (spec.id == 7) o << " t_frac=" << spec.t_frac;
  return o.str();
}

}  // namespace rpdcov::harness

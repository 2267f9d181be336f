// Samples one Brownian path, applies a few transforms, and runs a small
// identity check and law test.

#include <iostream>

#include "pathlaw/pathlaw.hpp"

using namespace pathlaw;

int main() {
  SampleSpec spec;
  spec.grid = Grid(1.0, 256);
  spec.seed = 42;
  const PlPath b = sample_brownian_path(spec, 0);

  const PlPath m = transform_M(b);
  const PlPath g = transform_G(b);
  const PlPath t = transform_Tc(b, 1.0, spec.grid);
  std::cout << "B_1 = " << b.terminal() << ", M(B)_1 = " << m.terminal()
            << ", G(B)_1 = " << g.terminal() << ", T(B)_1 = " << t.terminal() << '\n';
  std::cout << "|M(M(B)) - B| = " << sup_distance(transform_M(m), b) << '\n';
  std::cout << "log A_1(B) = " << log_A(b, 1.0, 1.0) << '\n';

  const auto paths = random_pl_paths(7, 20);
  const auto id = check_identity("m_involution", paths, 1e-9, 7);
  std::cout << id.identity_name << ": residual " << id.max_residual
            << (id.passed ? " (pass)" : " (fail)") << '\n';

  spec.n_paths = 2000;
  const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
  const auto law = invariance_test(TransformKind::M(), spec, times);
  std::cout << law.test_name << ": D = " << law.statistic << " vs " << law.threshold
            << (law.passed ? " (pass)" : " (fail)") << '\n';
  return 0;
}

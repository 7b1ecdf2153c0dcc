// Solving L b = btilde on torus flows, and where it breaks down.

#include <cmath>
#include <cstdio>

#include "sflow/embedding.hpp"

using namespace sflow;

int main() {
  const double alpha = std::sqrt(2.0) - 1.0;
  const TorusLinearFlow circle({alpha});

  auto btilde = TrigPolynomial::cosine({1});
  btilde.add_real_mode({3}, cplx(0.0, 0.2));
  const auto s = solve_embedding(circle, btilde);
  std::printf("rotation by %.6f: solved=%d\n", alpha, s.solved());
  for (const auto& [n, c] : s.b->coefficients()) std::printf("  b[%+d] = %+.6f %+.6fi\n", n[0], c.real(), c.imag());
  std::printf("  round trip gap %.3g\n", coefficient_distance(average_operator(circle, *s.b), btilde));

  // half-turn: the mode 2 sits on a resonance
  const auto blocked = solve_embedding(TorusLinearFlow({0.5}), TrigPolynomial::cosine({2}));
  std::printf("\nrotation by 0.5: solved=%d, resonant modes:", blocked.solved());
  for (const auto& r : blocked.resonances) std::printf(" %+d", r.n[0]);
  std::printf("\n");

  // the sawtooth on the 2-torus has a smooth orbit derivative but no continuous solution
  const TorusLinearFlow plane({alpha, std::sqrt(5.0) - 2.0});
  const auto report = bbp_test(
      plane, [](const Point& x) { return x[0] + x[1] - std::floor(x[0] + x[1]); }, torus_grid(2, 30),
      [](const Point& x) { return std::abs(x[0] + x[1] - std::round(x[0] + x[1])) < 1e-2; });
  std::printf("\nsawtooth: %zu samples, derivative %.10f (alpha1+alpha2 = %.10f), obstruction=%d\n", report.derivative.size(),
              report.mean, alpha + std::sqrt(5.0) - 2.0, report.obstruction);

  // exponential flow on the half line
  const auto avg = average_operator(ScalarExpFlow(), LogFunction{1.0, 0.0});
  std::printf("\nx -> e^t x: average of log x is log x %+.3f\n", avg.offset);
  const auto cubic = average_operator(ScalarExpFlow(true), HomogeneousPolynomial{1.0, 3});
  std::printf("             average of x^3 is %.6f x^3\n", cubic.coefficient);

  const auto res = resolvent_solve(circle, btilde, 3.0);
  std::printf("\nresolvent at lambda = 3: residual %.3g\n", res.residual);
}

// Pressure, Gibbs measures and a suspension flow over the golden-mean shift.

#include <cstdio>

#include "sflow/suspension.hpp"
#include "sflow/transfer.hpp"

using namespace sflow;

int main() {
  const Sft golden = Sft::golden_mean();
  std::printf("golden-mean shift: %g words of length 10, %zu points of period 10\n", count_words(golden, 10),
              periodic_points(golden, 10).size());

  // a potential rewarding the symbol 1; sweep the inverse temperature
  const auto phi = LocallyConstantFunction::per_symbol(golden, {0.0, 1.0});
  std::printf("\n%6s %12s %12s %12s\n", "beta", "P(beta phi)", "entropy", "mu[1]");
  for (double beta : {-2.0, -1.0, 0.0, 1.0, 2.0, 4.0}) {
    const auto mu = gibbs_measure(golden, beta * phi);
    std::printf("%6.2f %12.8f %12.8f %12.8f\n", beta, pressure(golden, beta * phi), entropy(mu), integrate(mu, phi));
  }

  // roof 1 over symbol 0, 2 over symbol 1
  const SuspensionFlow flow(golden, RoofFunction(LocallyConstantFunction::per_symbol(golden, {1.0, 2.0})));
  const double h_top = flow_pressure(flow, FlowFunction::constant(0.0));
  std::printf("\nflow topological entropy %.12f\n", h_top);

  const auto nu = gibbs_measure(golden, LocallyConstantFunction::constant(golden, 0.0));
  std::printf("Parry measure: base entropy %.12f, mean roof %.12f, flow entropy %.12f\n", entropy(nu),
              integrate(nu, flow.roof().function()), abramov_entropy(flow, nu));

  // flow one point forward and report where it lands
  const FlowPoint p{BasePoint(PeriodicPoint(golden, {0, 1, 0})), 0.25};
  for (double t : {0.5, 1.0, 3.0, 10.0}) {
    const auto q = flow_map(flow, p, t);
    std::printf("phi_%-4g (010..., 0.25) -> first symbol %d, height %.4f\n", t, q.base.at(0), q.height);
  }
}

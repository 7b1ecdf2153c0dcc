// Runs the equivalence pipeline on a matrix-cocycle family and prints the
// defect curves and the recovered generator.

#include <cstdio>

#include "sflow/equivalence.hpp"

using namespace sflow;

int main() {
  const Sft sft = Sft::full_shift(2);
  const SuspensionFlow flow(sft, RoofFunction(LocallyConstantFunction::per_symbol(sft, {1.0, 2.0})));

  Eigen::MatrixXd m0(2, 2), m1(2, 2);
  m0 << 2, 1, 1, 1;
  m1 << 1, 1, 1, 2;
  const auto family = FlowFamily::cocycle(flow, MatrixCocycle({m0, m1}));

  for (int n : {2, 4, 8}) {
    const auto r = equivalence_pipeline(flow, family, n, 64.0 * flow.roof().sup());
    std::printf("N = %d\n  xi:", n);
    int shown = 0;
    for (const auto& [w, v] : r.xi.table()) {
      if (shown++ == 4) {
        std::printf(" ...");
        break;
      }
      std::printf(" ");
      for (int c : w) std::printf("%d", c);
      std::printf("=%.5f", v);
    }
    std::printf("\n  discrete defect:");
    for (const auto& p : r.discrete_defect) std::printf(" n=%d:%.5f%s", p.n, p.value, p.exact ? "" : "*");
    std::printf("\n  flow defect:");
    for (const auto& p : r.flow_defect) std::printf(" t=%g:%.5f", p.time, p.value);
    std::printf("\n");
  }
  std::printf("(* taken over periodic samples only)\n");
}

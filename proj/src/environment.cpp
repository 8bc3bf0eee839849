#include "aixilab/environment.hpp"

namespace aixilab {

percept chronological_environment::sample(const history& h, int action, rng& r) const {
  auto dist = percept_distribution(h, action);
  rational total(0);
  for (const auto& wp : dist) total += wp.prob;
  if (total == 0) throw zero_mass("environment assigns zero mass to every next percept");

  // Exact inverse CDF with a dyadic uniform u = k / 2^63, renormalized by the
  // total mass so a strict semimeasure is sampled conditionally on survival.
  rational u(bigint(r.next_u64() >> 1), bigint(1) << 63);
  u *= total;
  rational cum(0);
  for (const auto& wp : dist) {
    cum += wp.prob;
    if (u < cum) return wp.p;
  }
  return dist.back().p;
}

}  // namespace aixilab

#include <photonbell/chsh.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace photonbell {

namespace {

double checked(const CorrelationFn &corr, double x, double y) {
  const double v = corr(x, y);
  if (!std::isfinite(v))
    throw std::domain_error("chsh: correlation is not finite");
  return v;
}

ChshResult result_from_terms(double ab, double abp, double apb, double apbp) {
  ChshResult r{ab, abp, apb, apbp, ab + abp + apb - apbp, false};
  r.violated = std::abs(r.s) > 2.0;
  return r;
}

} // namespace

ChshResult chsh_statistic(const ChshSetting &setting,
                          const CorrelationFn &corr) {
  const double a = wrap_phase(setting.a);
  const double ap = wrap_phase(setting.a_prime);
  const double b = wrap_phase(setting.b);
  const double bp = wrap_phase(setting.b_prime);
  return result_from_terms(checked(corr, a, b), checked(corr, a, bp),
                           checked(corr, ap, b), checked(corr, ap, bp));
}

ViolationSearch find_max_violation(const CorrelationFn &corr,
                                   int grid_resolution) {
  if (grid_resolution < 8)
    throw std::invalid_argument("find_max_violation: grid must be >= 8");
  const int g = grid_resolution;

  std::vector<double> phase(g);
  for (int k = 0; k < g; ++k)
    phase[k] = two_pi * k / g;

  // One correlation evaluation per (a-phase, b-phase) pair; the 4-tuple
  // scan only reads the table.
  std::vector<double> table(static_cast<std::size_t>(g) * g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      table[static_cast<std::size_t>(i) * g + j] =
          checked(corr, phase[i], phase[j]);
  const auto e = [&](int i, int j) {
    return table[static_cast<std::size_t>(i) * g + j];
  };

  double best = -1.0;
  int ba = 0, bap = 0, bb = 0, bbp = 0;
  for (int ia = 0; ia < g; ++ia)
    for (int iap = 0; iap < g; ++iap)
      for (int ib = 0; ib < g; ++ib)
        for (int ibp = 0; ibp < g; ++ibp) {
          const double s = e(ia, ib) + e(ia, ibp) + e(iap, ib) - e(iap, ibp);
          if (std::abs(s) > best) {
            best = std::abs(s);
            ba = ia;
            bap = iap;
            bb = ib;
            bbp = ibp;
          }
        }

  const ChshSetting setting{phase[ba], phase[bap], phase[bb], phase[bbp]};
  return {setting, result_from_terms(e(ba, bb), e(ba, bbp), e(bap, bb),
                                     e(bap, bbp))};
}

} // namespace photonbell

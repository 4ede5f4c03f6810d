#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "support/oracles.hpp"
#include "temadapter/autograd.hpp"

namespace temadapter::testing {

/// Largest relative error between tape gradients and central differences over
/// every parameter in `params`. `build` records a 1x1 loss on the given tape.
inline double max_gradient_error(const std::vector<Parameter*>& params,
                                 const std::function<Var(Tape&)>& build) {
  for (Parameter* p : params) p->zero_grad();
  {
    Tape tape;
    const Var loss = build(tape);
    tape.backward(loss);
    tape.accumulate_param_grads();
  }
  auto value = [&] {
    Tape tape(false);
    return build(tape).scalar();
  };
  const double floor = 1e-6 * std::max(1.0, std::abs(value()));
  double worst = 0.0;
  for (Parameter* p : params) {
    const Matrix numeric = finite_difference(p->value, value);
    worst = std::max(worst, gradient_relative_error(p->grad, numeric, floor));
  }
  return worst;
}

}  // namespace temadapter::testing

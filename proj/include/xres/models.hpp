#pragma once

#include <string>

#include "xres/config.hpp"
#include "xres/errors.hpp"
#include "xres/potentials.hpp"

namespace xres {

// Reference models with V1 = x^2 + x (well on [-1, 0], action pi (E + 1/4)) and contact order n = 1, 2, 3.
// The same data ships as models/contact_n{1,2,3}.json.
inline ModelConfig shipped_model(int n) {
  const Interval dom{-1.5, 1.0};
  const double e_max = 0.2;
  switch (n) {
    case 1:
      return {"contact_n1", PotentialModel({0.0, 1.0, 1.0}, {0.0, 2.0, 1.0}, -1.0, dom, e_max), {}};
    case 2:
      return {"contact_n2", PotentialModel({0.0, 1.0, 1.0}, {0.0, 1.0, 0.0, 1.0}, -1.0, dom, e_max), {}};
    case 3:
      return {"contact_n3", PotentialModel({0.0, 1.0, 1.0}, {0.0, 1.0, 1.0, 1.0}, -1.0, dom, e_max), {}};
    default:
      throw DomainError("shipped models exist for n = 1, 2, 3 only");
  }
}

}  // namespace xres

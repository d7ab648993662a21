#pragma once

#include "mvf/core.hpp"

namespace mvf {

// Single imputation: missing views get the zero vector of the feature
// dimension. Present views and all flags are untouched. Idempotent.
inline Collection impute(Collection c) {
  for (ViewObservation& v : c.views) {
    if (!v.present) v.features.assign(v.features.size(), 0.0);
  }
  return c;
}

inline void impute_in_place(Dataset& d) {
  for (Collection& c : d.collections) {
    for (ViewObservation& v : c.views) {
      if (!v.present) v.features.assign(v.features.size(), 0.0);
    }
  }
}

}  // namespace mvf

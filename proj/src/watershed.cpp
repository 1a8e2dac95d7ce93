#include "cellfield/watershed.hpp"

namespace cellfield {

void WatershedParams::validate() const {
  if (!(background_epsilon > 0.0 && background_epsilon < 1.0)) {
    throw Error("background epsilon must lie in (0, 1)");
  }
  if (!(h > 0.0 && h <= 1.0)) throw Error("h must lie in (0, 1]");
}

}  // namespace cellfield

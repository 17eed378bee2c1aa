#include "pingpong/random.hpp"

namespace pingpong {

double RandomSource::uniform() {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return static_cast<double>(engine_() >> 11) * kScale;
}

}  // namespace pingpong

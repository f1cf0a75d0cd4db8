#pragma once

#include "tibtext/resources.hpp"

namespace tibtext::test {

inline const Resources& resources() {
  static const Resources res = load_resources(TIBTEXT_DEFAULT_DATA_DIR);
  return res;
}

}  // namespace tibtext::test

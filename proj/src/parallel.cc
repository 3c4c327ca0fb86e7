#include "cesec/parallel.h"

#include <cstdlib>
#include <string>

namespace cesec {

unsigned default_workers() {
  if (const char* env = std::getenv("CESEC_WORKERS"); env != nullptr && *env != '\0') {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to automatic
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace cesec

#include "qfirob/parallel.hpp"

#include <cstdlib>
#include <string>

namespace qfirob {

std::size_t worker_count() {
  if (const char* env = std::getenv("QFIROB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace qfirob

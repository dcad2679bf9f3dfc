#ifndef OPMS_PARALLEL_H_
#define OPMS_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace opms {

// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is handled
// exactly once; callers write results into slot i so output order is input
// order regardless of scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& body);

}  // namespace opms

#endif  // OPMS_PARALLEL_H_

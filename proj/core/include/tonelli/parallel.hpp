#pragma once

#include <functional>

namespace tonelli {

/// Worker count: TONELLI_THREADS when set, else hardware concurrency.
int thread_budget();

/// Static partition over [0, count); fn(i) must write only slot i so the
/// result is independent of scheduling.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace tonelli

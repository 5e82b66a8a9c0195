#pragma once

// Runs a callable on a thread with a caller-chosen stack size. The searches
// recurse once per variable, which outgrows the default stack on large
// deterministic equivalents.

#include <pthread.h>

#include <cstddef>
#include <exception>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace qrobust::detail {

inline constexpr std::size_t kDefaultStack = std::size_t{8} << 20;

/// Stack bytes for a recursion `depth` levels deep.
inline std::size_t stack_for_depth(std::size_t depth) { return kDefaultStack + depth * 4096; }

template <class F>
auto with_stack(std::size_t bytes, F&& f) -> std::invoke_result_t<F&> {
  using R = std::invoke_result_t<F&>;
  if (bytes <= kDefaultStack) return f();
  struct Job {
    F* fn;
    std::optional<R> result;
    std::exception_ptr error;
  } job{&f, std::nullopt, nullptr};
  auto entry = [](void* arg) -> void* {
    auto* j = static_cast<Job*>(arg);
    try {
      j->result.emplace((*j->fn)());
    } catch (...) {
      j->error = std::current_exception();
    }
    return nullptr;
  };
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, bytes);
  pthread_t tid;
  const int rc = pthread_create(&tid, &attr, entry, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) throw std::runtime_error("cannot start search thread");
  pthread_join(tid, nullptr);
  if (job.error) std::rethrow_exception(job.error);
  return std::move(*job.result);
}

}  // namespace qrobust::detail

#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

#include "sweepsim/engine.hpp"
#include "sweepsim/errors.hpp"
#include "sweepsim/model.hpp"
#include "sweepsim/rng.hpp"

namespace sweepsim {

struct HarnessOptions {
  int threads = 1;
  std::uint64_t attempt_cap = 0;  // 0: max(10^4, 1000 * n_fixed)
  RunOptions run;
};

/// Runs work(i) for i in [0, n) across workers and folds the results
/// strictly in index order. Results are keyed by index, so the fold sees the
/// same sequence for any worker count. Work exceptions are re-thrown in index
/// order once the batch has joined.
template <class T, class Work, class Fold>
void map_fold_ordered(std::uint64_t n, int threads, Work&& work, Fold&& fold) {
  if (n == 0) return;
  const auto batch_size = static_cast<std::uint64_t>(std::max(1, threads)) * 16;
  for (std::uint64_t start = 0; start < n; start += batch_size) {
    const std::uint64_t m = std::min(batch_size, n - start);
    std::vector<T> results(m);
    std::vector<std::exception_ptr> errors(m);
    if (threads <= 1) {
      for (std::uint64_t j = 0; j < m; ++j) {
        try {
          results[j] = work(start + j);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      }
    } else {
      std::atomic<std::uint64_t> next{0};
      auto worker = [&] {
        for (std::uint64_t j; (j = next.fetch_add(1)) < m;) {
          try {
            results[j] = work(start + j);
          } catch (...) {
            errors[j] = std::current_exception();
          }
        }
      };
      std::vector<std::thread> pool;
      const auto n_workers = static_cast<std::uint64_t>(threads) < m
                                 ? static_cast<std::uint64_t>(threads)
                                 : m;
      pool.reserve(static_cast<std::size_t>(n_workers));
      for (std::uint64_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
      for (std::thread& th : pool) th.join();
    }
    for (std::uint64_t j = 0; j < m; ++j) {
      if (errors[j]) std::rethrow_exception(errors[j]);
      if (!fold(start + j, std::move(results[j]))) return;
    }
  }
}

struct ConditionedStats {
  std::uint64_t attempts = 0;
  std::uint64_t collected = 0;
};

/// Rejection sampling of fixed sweeps: attempt i runs with seed
/// derive_seed(master_seed, i); the j-th fixed outcome (in attempt order)
/// becomes replicate j. consume(j, outcome) is called sequentially in
/// replicate order. Deterministic for any worker count.
template <class Consumer>
ConditionedStats run_conditioned(const EcoParams& params, std::int64_t n_fixed,
                                 std::uint64_t master_seed, const HarnessOptions& opts,
                                 Consumer&& consume) {
  require_sweep_regime(params);
  ConditionedStats stats;
  if (n_fixed <= 0) return stats;
  const std::uint64_t cap =
      opts.attempt_cap ? opts.attempt_cap
                       : std::max<std::uint64_t>(10'000, 1'000 * static_cast<std::uint64_t>(n_fixed));

  bool done = false;
  auto work = [&](std::uint64_t attempt) {
    return run_sweep(params, derive_seed(master_seed, attempt), opts.run);
  };
  auto fold = [&](std::uint64_t, SweepOutcome&& outcome) {
    ++stats.attempts;
    if (outcome.fixed) {
      consume(stats.collected, std::move(outcome));
      ++stats.collected;
      if (stats.collected == static_cast<std::uint64_t>(n_fixed)) {
        done = true;
        return false;
      }
    }
    return true;
  };
  map_fold_ordered<SweepOutcome>(cap, opts.threads, work, fold);
  if (!done) throw AttemptCapExceeded(stats.attempts, stats.collected,
                                      static_cast<std::uint64_t>(n_fixed));
  return stats;
}

}  // namespace sweepsim

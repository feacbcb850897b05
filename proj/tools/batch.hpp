#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "apu/error.hpp"
#include "apu/scenario/scenario.hpp"

namespace apu::batch {

/// Seed of run `index` in a batch seeded by `base`.
std::uint64_t run_seed(std::uint64_t base, std::size_t index);

/// Worker count: the OpenMP maximum, capped by APU_COSIM_THREADS when set to a positive integer.
int worker_count();

struct RunError {
    std::size_t index = 0;
    Errc code = Errc::InvalidArgument;
    bool numerical = false;
    std::string message;
};

/// Called inside a worker for each finished run; must only touch run-specific state.
using RunSink = std::function<void(std::size_t index, const scenario::Scenario&, const cosim::RunResult&)>;

struct BatchOutcome {
    std::vector<std::optional<RunError>> errors;  ///< one slot per run
    [[nodiscard]] const RunError* first_error() const;
};

/// Runs `runs` copies of `base`, run i seeded by run_seed(base.seed, i), one
/// simulation per worker. The gas generator is sized once up front.
BatchOutcome run_batch(const scenario::Scenario& base, std::size_t runs, int workers, const RunSink& sink,
                       const scenario::RunOptions& options = {});

}  // namespace apu::batch

#include "batch.hpp"

#include <cstdlib>
#include <exception>
#include <omp.h>

namespace apu::batch {

std::uint64_t run_seed(std::uint64_t base, std::size_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int worker_count() {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("APU_COSIM_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0 && cap < n) n = static_cast<int>(cap);
    }
    return n < 1 ? 1 : n;
}

const RunError* BatchOutcome::first_error() const {
    for (const auto& e : errors)
        if (e) return &*e;
    return nullptr;
}

BatchOutcome run_batch(const scenario::Scenario& base, std::size_t runs, int workers, const RunSink& sink,
                       const scenario::RunOptions& options) {
    scenario::validate(base);
    std::optional<gasgen::GasGenParams> sized;
    if (base.mode != scenario::Mode::Generator) sized = gasgen::design_point_size(base.design).params;
    scenario::RunOptions opts = options;
    if (sized) opts.sized = &*sized;

    BatchOutcome out;
    out.errors.resize(runs);
    const long n = static_cast<long>(runs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (long i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        scenario::Scenario s = base;
        s.seed = run_seed(base.seed, k);
        try {
            const cosim::RunResult r = scenario::run(s, opts);
            sink(k, s, r);
        } catch (const Error& e) {
            out.errors[k] = RunError{k, e.code(), is_numerical(e.code()), e.what()};
        } catch (const std::exception& e) {
            out.errors[k] = RunError{k, Errc::InvalidArgument, true, e.what()};
        }
    }
    return out;
}

}  // namespace apu::batch

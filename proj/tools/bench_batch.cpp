#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "apu/scenario/output.hpp"
#include "batch.hpp"

using namespace apu;

namespace {

struct Timed {
    std::vector<std::uint64_t> hashes;
    double seconds = 0.0;
};

Timed run(const scenario::Scenario& s, std::size_t runs, int workers) {
    Timed t;
    t.hashes.assign(2 * runs, 0);
    const auto t0 = std::chrono::steady_clock::now();
    const batch::BatchOutcome out =
        batch::run_batch(s, runs, workers, [&](std::size_t k, const scenario::Scenario& sc, const cosim::RunResult& r) {
            const scenario::Tracks tr = scenario::selected(sc, r);
            t.hashes[2 * k] = scenario::fnv1a(scenario::csv_text(tr.fast));
            t.hashes[2 * k + 1] = scenario::fnv1a(scenario::csv_text(tr.slow));
        });
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (const batch::RunError* e = out.first_error()) {
        std::fprintf(stderr, "run %zu failed: %s\n", e->index, e->message.c_str());
        std::exit(2);
    }
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t runs = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 8;
    const double duration = argc > 2 ? std::strtod(argv[2], nullptr) : 1.0;
    scenario::Scenario s = scenario::preset("design");
    s.duration = duration;
    s.state_noise = 10.0;
    s.machine_noise.std_vv = 0.5;
    s.output_noise["T4"] = 1.0;
    s.record_every = 10;

    const int workers = batch::worker_count();
    const Timed serial = run(s, runs, 1);
    const Timed parallel = run(s, runs, workers);
    const bool same = serial.hashes == parallel.hashes;
    std::printf("runs %zu, %.2f s simulated each\n", runs, duration);
    std::printf("serial    1 worker   %8.3f s\n", serial.seconds);
    std::printf("parallel %2d workers  %8.3f s  speedup %.2fx\n", workers, parallel.seconds,
                serial.seconds / parallel.seconds);
    std::printf("outputs identical: %s\n", same ? "yes" : "NO");
    return same ? 0 : 1;
}

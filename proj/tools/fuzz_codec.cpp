// Standalone fuzz harness for the wire codec. Runs the same driver as the
// test suite but for as long as asked — e.g. a one-hour soak:
//
//   uascan_fuzz --seconds 3600
//
// Exit code 0 means every input either decoded or was rejected with a typed
// error; 1 means something escaped (details on stderr).

#include <chrono>
#include <cstdint>
#include <iostream>

#include <CLI11.hpp>

#include "support/fuzz_driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"wire codec fuzzer"};
    uint64_t iterations = 500000;
    uint64_t seconds = 0;
    uint64_t seed = 0x5eed;
    app.add_option("--iterations", iterations, "inputs to generate")->capture_default_str();
    app.add_option("--seconds", seconds,
                   "wall-clock limit; 0 runs --iterations to completion, otherwise inputs "
                   "are generated until the deadline")
        ->capture_default_str();
    app.add_option("--seed", seed, "corpus seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    const auto start = std::chrono::steady_clock::now();
    std::optional<std::chrono::steady_clock::time_point> deadline;
    if (seconds > 0) {
        deadline = start + std::chrono::seconds(seconds);
        iterations = UINT64_MAX;
    }

    fuzz::Stats total;
    uint64_t next_report = 1000000;
    while (total.iterations < iterations) {
        // batches keep the memory profile flat and the progress line honest
        const uint64_t batch = std::min<uint64_t>(iterations - total.iterations, 100000);
        auto stats = fuzz::run(seed + total.iterations, batch, deadline);
        total.iterations += stats.iterations;
        total.decoded += stats.decoded;
        total.rejected += stats.rejected;
        if (!stats.clean()) {
            total.failure = stats.failure;
            break;
        }
        if (stats.iterations < batch) break;  // deadline hit
        if (total.iterations >= next_report) {
            std::cerr << "... " << total.iterations << " inputs\n";
            next_report += 1000000;
        }
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    std::cout << "inputs:   " << total.iterations << "\n"
              << "decoded:  " << total.decoded << "\n"
              << "rejected: " << total.rejected << " (typed errors)\n"
              << "elapsed:  " << elapsed.count() << " ms\n";
    if (!total.clean()) {
        std::cerr << "FAILURE: unexpected exception escaped the codec: " << total.failure
                  << "\n";
        return 1;
    }
    std::cout << "no crashes, no unexpected exceptions\n";
    return 0;
}

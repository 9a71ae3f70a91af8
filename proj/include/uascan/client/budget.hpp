#pragma once

#include <chrono>
#include <cstdint>
#include <thread>

namespace uascan {

/// Per-campaign politeness budget. Defaults match responsible-scanning
/// practice: half a second between requests to one host, an hour and
/// 50 MB of traffic per host at most.
struct ScanBudget {
    std::chrono::milliseconds inter_request_delay{500};
    std::chrono::milliseconds max_duration_per_host{60 * 60 * 1000};
    uint64_t max_bytes_per_host = 50ull * 1024 * 1024;
    unsigned global_concurrency = 16;

    bool valid() const {
        return inter_request_delay.count() > 0 && max_duration_per_host.count() > 0 &&
               max_bytes_per_host > 0 && global_concurrency > 0;
    }
};

namespace client {

/// Enforces one host's share of the budget. The pacer sleeps slightly past
/// the configured delay so that gaps observed by the *server* stay above
/// the threshold even with scheduler jitter on our side.
class BudgetTracker {
public:
    static constexpr std::chrono::milliseconds kPaceMargin{5};

    explicit BudgetTracker(const ScanBudget& budget)
        : budget_(budget), started_(std::chrono::steady_clock::now()) {}

    /// Sleeps until at least inter_request_delay has passed since the last
    /// paced send. The first send is not delayed.
    void pace() {
        auto now = std::chrono::steady_clock::now();
        if (have_sent_) {
            auto next = last_send_ + budget_.inter_request_delay + kPaceMargin;
            if (now < next) {
                std::this_thread::sleep_for(next - now);
                now = std::chrono::steady_clock::now();
            }
        }
        last_send_ = now;
        have_sent_ = true;
    }

    /// Traffic in either direction counts: the limit protects the target,
    /// and pulling data is not more polite than pushing it.
    void add_bytes(uint64_t n) { bytes_ += n; }
    uint64_t bytes_used() const { return bytes_; }

    std::chrono::milliseconds elapsed() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started_);
    }

    bool time_exhausted() const { return elapsed() >= budget_.max_duration_per_host; }
    bool bytes_exhausted() const { return bytes_ >= budget_.max_bytes_per_host; }
    bool exhausted() const { return time_exhausted() || bytes_exhausted(); }

    /// IO deadline for the next read: the smaller of the io timeout and
    /// what is left of the host's time budget (at least 1 ms so a read
    /// attempt can fail cleanly instead of blocking forever).
    std::chrono::milliseconds read_deadline(std::chrono::milliseconds io_timeout) const {
        auto left = budget_.max_duration_per_host - elapsed();
        if (left < std::chrono::milliseconds(1)) left = std::chrono::milliseconds(1);
        return left < io_timeout ? left : io_timeout;
    }

    const ScanBudget& budget() const { return budget_; }

private:
    ScanBudget budget_;
    std::chrono::steady_clock::time_point started_;
    std::chrono::steady_clock::time_point last_send_{};
    bool have_sent_ = false;
    uint64_t bytes_ = 0;
};

}  // namespace client
}  // namespace uascan

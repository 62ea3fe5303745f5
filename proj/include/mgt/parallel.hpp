#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace mgt {

/// Worker count for parallel kernels: the OpenMP maximum, capped by MGT_THREADS when set.
int default_threads();

/// Collects the first exception (by index) thrown inside a parallel loop so it can be
/// rethrown on the calling thread with serial semantics.
class FirstError {
public:
    explicit FirstError(std::size_t n) : errors_(n) {}

    void capture(std::size_t index) noexcept { errors_[index] = std::current_exception(); }

    void rethrow() const {
        for (const auto& e : errors_) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }

private:
    std::vector<std::exception_ptr> errors_;
};

} // namespace mgt

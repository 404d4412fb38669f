#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace disre {

/// Invalid input: bad parameters, malformed files, violated preconditions.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative solve that did not reach its tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, std::size_t iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

namespace detail {
inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}
}  // namespace detail

}  // namespace disre

/**
 * Error taxonomy shared by the library and the CLI.
 *
 * Exceptions map onto the stable CLI exit-code contract:
 *   ConfigError  -> 2 (bad input / malformed configuration)
 *   ComputeError -> 3 (numerical or combinatorial infeasibility)
 *   IoError      -> 4 (filesystem / serialization failures)
 */

#ifndef QTDA_ERRORS_HPP
#define QTDA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qtda {

/** Malformed input data or configuration (CLI exit code 2). */
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Computation cannot proceed: overflow, infeasible budget, non-convergence (exit code 3). */
class ComputeError : public std::runtime_error {
public:
    explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

/** I/O failure (exit code 4). */
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qtda

#endif  // QTDA_ERRORS_HPP

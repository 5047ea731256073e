#ifndef LSPCM_COMMON_HPP
#define LSPCM_COMMON_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace lspcm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

/// Bad input: malformed data, violated preconditions.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Misuse of an API or CLI option (unknown scenario, bad key, ...).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure during a run (non-finite likelihood, ...).
class RuntimeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Emit a warning on stderr unless LSPCM_QUIET is set.
void warn(const std::string& message);

/// Number of warnings emitted so far in this process (tests use this).
long warning_count();

}  // namespace lspcm

#endif

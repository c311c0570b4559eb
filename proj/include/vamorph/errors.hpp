#pragma once

#include <stdexcept>
#include <string>

namespace vamorph {

// Error taxonomy mirrored by the CLI exit codes:
// validation -> 2, I/O -> 3, computation -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ComputeError : public Error {
public:
    using Error::Error;
};

// A morph that fails the misalignment screen. Not a hard failure for batch
// runs: the orchestrator logs the reason and omits the sample.
class MorphRejected : public ComputeError {
public:
    explicit MorphRejected(const std::string& reason)
        : ComputeError("morph rejected: " + reason), reason_(reason) {}

    const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
};

}  // namespace vamorph

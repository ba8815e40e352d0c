#pragma once

#include <stdexcept>
#include <string>

namespace biofilm {

// Base class for every failure this library reports.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Mathematically invalid input: negative density, K4+S <= 0, off-grid lookup, ...
class domain_error : public error {
public:
    using error::error;
};

// Diffusivity evaluated at or beyond the singular endpoint M = 1 with a > 0.
class singularity_error : public error {
public:
    using error::error;
};

// A linear system lost a usable pivot; `row` is the offending 0-based row.
class singular_system_error : public error {
public:
    singular_system_error(const std::string& what, int row_) : error(what), row(row_) {}
    int row;
};

// A hypothesis required by a closed-form recovery stage fails at the supplied points.
class assumption_error : public error {
public:
    using error::error;
};

// Forward march left the physically plausible range (|S| or |M| > 1e6).
class blowup_error : public error {
public:
    using error::error;
};

// A documented interface contract was violated by the data (not by the caller's types).
class contract_error : public error {
public:
    using error::error;
};

// Malformed input file; `line` is 1-based, 0 when not tied to a specific line.
class parse_error : public error {
public:
    parse_error(const std::string& what, long line_ = 0) : error(what), line(line_) {}
    long line;
};

// Residual evaluation failed inside the optimizer; message carries the candidate X.
class evaluation_error : public error {
public:
    using error::error;
};

} // namespace biofilm

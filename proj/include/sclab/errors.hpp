#pragma once

#include <stdexcept>
#include <string>

namespace sclab {

// Malformed input: broken invariants, unparsable files, weights that do not
// sum to one, and similar caller mistakes.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A Scripted tie-break ran out of entries or pointed outside the tie set.
struct TieBreakError : std::runtime_error {
    explicit TieBreakError(const std::string& what) : std::runtime_error(what) {}
};

// A learner that assumes a consistent target saw evidence ruling every
// candidate out (empty version space, emptied consistent graph set, ...).
struct RealizabilityError : std::runtime_error {
    explicit RealizabilityError(const std::string& what) : std::runtime_error(what) {}
};

// A brute-force oracle was asked to enumerate past its configured budget.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// Round structure violated: feedback before a proposal, a missing field the
// active feedback setting was supposed to deliver, incompatible learner.
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sclab

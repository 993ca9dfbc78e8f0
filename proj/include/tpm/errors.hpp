/* errors.hpp -- exception hierarchy shared across the library */

#pragma once

#include <stdexcept>
#include <string>

namespace tpm {

/* Input text could not be parsed (bad syntax, malformed numbers, ...). */
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/* Input parsed but violates a semantic requirement (automaton or word
 * well-formedness, unknown references, ...). */
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/* Pattern automaton accepts no word at all. */
class NoAcceptedWord : public ValidationError {
public:
    explicit NoAcceptedWord(const std::string& what) : ValidationError(what) {}
};

/* A streamed event carries a timestamp not strictly greater than its
 * predecessor's. */
class OutOfOrderEvent : public ValidationError {
public:
    explicit OutOfOrderEvent(const std::string& what) : ValidationError(what) {}
    OutOfOrderEvent(const std::string& what, std::size_t index)
        : ValidationError(what), index(index) {}
    std::size_t index = 0; // 1-based position of the offending event; 0 if unknown
};

/* Timed-word event at `index` (1-based) breaks strict timestamp increase. */
class NonMonotoneTimestamp : public ValidationError {
public:
    explicit NonMonotoneTimestamp(std::size_t index)
        : ValidationError("timestamp at event " + std::to_string(index) +
                          " is not strictly greater than its predecessor"),
          index(index) {}
    std::size_t index;
};

/* Timed-word event at `index` (1-based) has a non-positive timestamp. */
class NonPositiveTimestamp : public ValidationError {
public:
    explicit NonPositiveTimestamp(std::size_t index)
        : ValidationError("timestamp at event " + std::to_string(index) + " is not positive"),
          index(index) {}
    std::size_t index;
};

/* Segment interval does not satisfy 0 <= t < t'. */
class InvalidInterval : public ValidationError {
public:
    explicit InvalidInterval(const std::string& what) : ValidationError(what) {}
};

/* The online matcher's bounded event buffer would exceed its configured
 * capacity. */
class BufferOverflow : public std::runtime_error {
public:
    explicit BufferOverflow(const std::string& what) : std::runtime_error(what) {}
};

} // namespace tpm

#pragma once

#include <stdexcept>
#include <string>

namespace causal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed graph: cycles, self-loops, duplicate nodes or edges.
class GraphError : public Error {
 public:
  using Error::Error;
};

/// An edge set references an arrow that is not part of the graph.
class InvalidEdgeError : public Error {
 public:
  using Error::Error;
};

/// Caller supplied arguments that violate an operation's preconditions.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Enumeration would exceed the configured state-space cap.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (singular systems, non-finite results).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Input file could not be parsed. The message carries file/line context.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace causal

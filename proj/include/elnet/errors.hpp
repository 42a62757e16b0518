#pragma once

#include <stdexcept>
#include <string>

namespace elnet {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Destination unreachable from the origin.
class NoPath : public Error {
 public:
  using Error::Error;
};

/// A reduced Laplacian or KKT system could not be factorized or solved.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

/// Social cost computed from flows and from node potentials disagree.
class InconsistentMultipliers : public Error {
 public:
  using Error::Error;
};

class NotSeriesParallel : public Error {
 public:
  using Error::Error;
};

/// Source and sink (or origin and destination) lie in different components.
class Disconnected : public Error {
 public:
  using Error::Error;
};

class ZeroFlowLink : public Error {
 public:
  using Error::Error;
};

/// Start node's component contains no absorbing node.
class Unreachable : public Error {
 public:
  using Error::Error;
};

/// Closed-form gain requested for a link that carries no flow at equilibrium.
class LinkUnsupported : public Error {
 public:
  using Error::Error;
};

/// Strict complementarity fails: some link has zero flow and zero multiplier.
class Degenerate : public Error {
 public:
  using Error::Error;
};

/// Malformed network file or command-line value.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace elnet

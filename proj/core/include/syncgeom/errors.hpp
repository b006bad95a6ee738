#pragma once

#include <stdexcept>
#include <string>

namespace syncgeom {

enum class ErrorKind {
  SelfLoop,
  DuplicateEdge,
  NonpositiveWeight,
  DimensionMismatch,
  NoSuchEdge,
  ZeroNorm,
  EmptySubset,
  DisconnectedGraph,
  BrokenPath,
  RankDeficient,
  RankDeficientBlock,
  NotSynchronizable,
  ConvergenceFailure,
  TooFewPoints,
  DegenerateWeights,
  ZeroVolumeClass,
  NotGraphical,
  RetriesExhausted,
  LengthMismatch,
  Io,
  Parse,
  Validation,
};

const char* error_kind_name(ErrorKind k);

/// True for failures of the numerical machinery (eigensolves, rank tests,
/// exhausted sampling retries) as opposed to bad input.
bool error_kind_is_numerical(ErrorKind k);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  const char* kind_name() const { return error_kind_name(kind_); }
  bool is_numerical() const { return error_kind_is_numerical(kind_); }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& detail) {
  throw Error(kind, detail);
}

}  // namespace syncgeom

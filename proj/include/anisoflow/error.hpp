#pragma once

#include <stdexcept>
#include <string>

namespace anisoflow {

enum class ErrorKind {
  InvalidDimension,
  Parse,
  UnsupportedVersion,
  EmptyMesh,
  Index,
  FieldMismatch,
  GeometryOutside,
  UniformSign,
  NonUnitVector,
  Mode,
  UnknownModel,
  Inadmissible,
  NoConvergence,
  InsufficientData,
  DegenerateData,
  ProbeOutside,
  Validation,
  Io,
};

inline const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the MSH reader; carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(double residual, long iterations)
      : Error(ErrorKind::NoConvergence,
              "relative residual " + std::to_string(residual) + " after " +
                  std::to_string(iterations) + " iterations"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid dimension";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::UnsupportedVersion: return "unsupported version";
    case ErrorKind::EmptyMesh: return "empty mesh";
    case ErrorKind::Index: return "index error";
    case ErrorKind::FieldMismatch: return "field-mesh mismatch";
    case ErrorKind::GeometryOutside: return "geometry outside domain";
    case ErrorKind::UniformSign: return "uniform sign";
    case ErrorKind::NonUnitVector: return "non-unit vector";
    case ErrorKind::Mode: return "mode error";
    case ErrorKind::UnknownModel: return "unknown model";
    case ErrorKind::Inadmissible: return "inadmissible model";
    case ErrorKind::NoConvergence: return "no convergence";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::DegenerateData: return "degenerate data";
    case ErrorKind::ProbeOutside: return "probe outside mesh";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

}  // namespace anisoflow

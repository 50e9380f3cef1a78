#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace twistlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& where, std::size_t expected, std::size_t got)
      : Error(where + ": dimension mismatch (expected " + std::to_string(expected) +
              ", got " + std::to_string(got) + ")") {}
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

// Raised when the Luxemburg modular cannot be bracketed. Valid Orlicz functions
// never trigger it; the message carries the bracket state for diagnosis.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

struct WitnessDiagnostics {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  std::string note;
};

class WitnessDivergence : public Error {
 public:
  WitnessDivergence(const std::string& map_name, WitnessDiagnostics diag)
      : Error("witness for '" + map_name + "' did not converge after " +
              std::to_string(diag.iterations) + " iterations (residual " +
              std::to_string(diag.residual) + ")" +
              (diag.note.empty() ? std::string{} : ": " + diag.note)),
        diagnostics(std::move(diag)) {}

  WitnessDiagnostics diagnostics;
};

// Inverting a diagonal map whose multiplier vanishes somewhere.
class InversionRefused : public Error {
 public:
  InversionRefused(const std::string& map_name, std::vector<std::size_t> zero_coords)
      : Error(make_message(map_name, zero_coords)), coordinates(std::move(zero_coords)) {}

  std::vector<std::size_t> coordinates;

 private:
  static std::string make_message(const std::string& name, const std::vector<std::size_t>& idx) {
    std::string msg = "cannot invert '" + name + "': zero multiplier at coordinate";
    msg += idx.size() == 1 ? " " : "s ";
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (k) msg += ",";
      if (k == 8) {
        msg += "... (" + std::to_string(idx.size()) + " total)";
        break;
      }
      msg += std::to_string(idx[k]);
    }
    return msg;
  }
};

}  // namespace twistlab

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace granmilp {

enum class ErrorKind {
  Validation,
  Parse,
  XiOutOfRange,
  SlaterInfeasible,
  TightenedInfeasible,
  NonpositiveMargin,
  NotConverged,
  StepSizeViolation,
  ReferenceMissing,
  TooLarge,
  MixedUnsupported,
  Infeasible,
  EmptyPolyhedron,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input document; carries a 1-based source position when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(ErrorKind::Parse, format(what, line, column)), line_(line), column_(column) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
  }
  std::size_t line_;
  std::size_t column_;
};

/// No strictly feasible point was found. The least-violating point is kept
/// so callers can report how far off the system is.
class SlaterInfeasible : public Error {
 public:
  SlaterInfeasible(std::vector<double> best_point, double best_margin, const std::string& what)
      : Error(ErrorKind::SlaterInfeasible, what), best_point_(std::move(best_point)),
        best_margin_(best_margin) {}
  [[nodiscard]] const std::vector<double>& best_point() const noexcept { return best_point_; }
  [[nodiscard]] double best_margin() const noexcept { return best_margin_; }

 private:
  std::vector<double> best_point_;
  double best_margin_;
};

class TightenedInfeasible : public Error {
 public:
  TightenedInfeasible(double untightened_margin, double phi)
      : Error(ErrorKind::TightenedInfeasible,
              "tightened constraints have no strict interior point: best margin " +
                  std::to_string(untightened_margin) + " does not exceed phi " + std::to_string(phi)),
        margin_(untightened_margin), phi_(phi) {}
  [[nodiscard]] double margin() const noexcept { return margin_; }
  [[nodiscard]] double phi() const noexcept { return phi_; }

 private:
  double margin_;
  double phi_;
};

class NotConverged : public Error {
 public:
  NotConverged(std::vector<double> z, std::vector<double> lambda, double residual, long iters)
      : Error(ErrorKind::NotConverged, "saddle iteration stopped after " + std::to_string(iters) +
                                           " iterations with residual " + std::to_string(residual)),
        z_(std::move(z)), lambda_(std::move(lambda)), residual_(residual), iters_(iters) {}
  [[nodiscard]] const std::vector<double>& z() const noexcept { return z_; }
  [[nodiscard]] const std::vector<double>& lambda() const noexcept { return lambda_; }
  [[nodiscard]] double residual() const noexcept { return residual_; }
  [[nodiscard]] long iterations() const noexcept { return iters_; }

 private:
  std::vector<double> z_;
  std::vector<double> lambda_;
  double residual_;
  long iters_;
};

}  // namespace granmilp

#ifndef GNEPVI_ERRORS_HPP
#define GNEPVI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gnepvi {

/// Caller misuse: dimension mismatches, bad arguments, malformed input files.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Well-formed input describing a model this toolkit rejects (unbounded set,
/// empty feasible region, inconsistent schema content).
struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Runtime numerical failure: division by zero, non-convergence, singular step.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Cone estimation could not produce a verified separating direction. Usually
/// means the declared own-variable quasiconvexity does not hold at the point.
struct ConeEstimationError : std::runtime_error {
  ConeEstimationError(int player_index, const std::string& msg, int evidence_size)
      : std::runtime_error(msg), player(player_index), evidence(evidence_size) {}
  int player;
  int evidence;
};

/// A claimed VI certificate failed revalidation (w not a member of T(x)).
struct CertificateInvalid : std::runtime_error {
  explicit CertificateInvalid(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gnepvi

#endif

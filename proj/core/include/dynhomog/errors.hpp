#ifndef DYNHOMOG_ERRORS_HPP
#define DYNHOMOG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dynhomog {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A material constant, thickness, or other strictly positive input was <= 0.
class NonPositiveInput : public Error {
 public:
  using Error::Error;
};

/// A unit cell was constructed with no layers.
class EmptyCell : public Error {
 public:
  using Error::Error;
};

/// Per-layer subdivision counts do not match the number of layers.
class CountMismatch : public Error {
 public:
  using Error::Error;
};

/// A tolerance parameter lies outside its admissible range.
class InvalidTolerance : public Error {
 public:
  using Error::Error;
};

/// A kernel denominator nu^2 - (xi+q)^2 is within the pole exclusion window.
/// Callers are expected to resample the frequency.
class NearPole : public Error {
 public:
  NearPole(const std::string& what, double omega, double q)
      : Error(what), omega(omega), q(q) {}
  double omega;
  double q;
};

/// The coupled eigenfield system is numerically singular at this (omega, q).
class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& what, double omega, double q)
      : Error(what), omega(omega), q(q) {}
  double omega;
  double q;
};

/// Fewer dispersion roots were found in the scan range than requested.
class InsufficientRoots : public Error {
 public:
  InsufficientRoots(const std::string& what, int found, int requested)
      : Error(what), found(found), requested(requested) {}
  int found;
  int requested;
};

/// |1 + v_p * S| fell below threshold when forming the on-branch parameters.
class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

/// A mode shape was requested at a (q, omega) pair that does not satisfy the
/// exact dispersion relation.
class NotOnBranch : public Error {
 public:
  using Error::Error;
};

/// A cell-average needed as a normalizing denominator vanished.
class ZeroAverage : public Error {
 public:
  using Error::Error;
};

}  // namespace dynhomog

#endif

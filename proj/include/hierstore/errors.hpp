#pragma once

#include <stdexcept>
#include <string>

namespace hierstore {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// finite_field
class NotPrime : public Error { public: using Error::Error; };
class InverseOfZero : public Error { public: using Error::Error; };
class Singular : public Error { public: using Error::Error; };
class ShapeMismatch : public Error { public: using Error::Error; };
class DuplicatePoints : public Error { public: using Error::Error; };

// mds
class FieldTooSmall : public Error { public: using Error::Error; };
class NotMds : public Error { public: using Error::Error; };
class TooFewSymbols : public Error { public: using Error::Error; };
class InconsistentSymbols : public Error { public: using Error::Error; };

// pm_code / mbr_exact
class InvalidParams : public Error { public: using Error::Error; };
class ConditionsUnsatisfiable : public Error { public: using Error::Error; };
class BudgetExceeded : public Error { public: using Error::Error; };
class InvalidRepairRequest : public Error { public: using Error::Error; };
class SingularRepairMatrix : public Error { public: using Error::Error; };
class SingularPhiLeft : public Error { public: using Error::Error; };
class TooManyLocalFailures : public Error { public: using Error::Error; };
class TooFewClusters : public Error { public: using Error::Error; };

// tradeoff / opportunistic
class InfeasibleGamma : public Error { public: using Error::Error; };
class Infeasible : public Error { public: using Error::Error; };
class InfeasibleAlpha : public Error { public: using Error::Error; };
class ROutOfRange : public Error { public: using Error::Error; };
class MissingBeta : public Error { public: using Error::Error; };
class InstanceTooLarge : public Error { public: using Error::Error; };

// repair_sim
class TooFewLiveNodes : public Error { public: using Error::Error; };

// serialization
class FormatError : public Error { public: using Error::Error; };

}  // namespace hierstore

#pragma once

#include <string>
#include <vector>

#include "core.hpp"

namespace gdual {

// One named residual check: pass iff residual < bound.
struct CheckItem {
  std::string name;
  double residual = 0;
  double bound = 0;
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckItem> items;

  void add(const std::string& name, double residual, double bound) {
    items.push_back({name, residual, bound, residual < bound});
  }
  bool pass() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return true;
  }
  double maxResidual() const {
    double m = 0;
    for (const auto& it : items) m = std::max(m, it.residual);
    return m;
  }
  const CheckItem* find(const std::string& name) const {
    for (const auto& it : items)
      if (it.name == name) return &it;
    return nullptr;
  }
  std::string summary() const {
    std::string s;
    for (const auto& it : items) {
      s += it.name + ": " + std::to_string(it.residual) + (it.pass ? " ok" : " FAIL") + "\n";
    }
    return s;
  }
};

struct NotARepresentation : GdualError {
  explicit NotARepresentation(const std::string& m) : GdualError("NotARepresentation: " + m) {}
};
struct ActionInvalid : GdualError {
  explicit ActionInvalid(const std::string& m) : GdualError("ActionInvalid: " + m) {}
};
struct NotInAlgebra : GdualError {
  explicit NotInAlgebra(const std::string& m) : GdualError("NotInAlgebra: " + m) {}
};
struct NotUnitary : GdualError {
  explicit NotUnitary(const std::string& m) : GdualError("NotUnitary: " + m) {}
};
struct NotACocycle : GdualError {
  explicit NotACocycle(const std::string& m) : GdualError("NotACocycle: " + m) {}
};
struct NotProductForm : GdualError {
  explicit NotProductForm(const std::string& m) : GdualError("NotProductForm: " + m) {}
};
struct Failure : GdualError {
  std::string reason;  // e.g. "NonInvertiblePushDown"
  Failure(std::string r, const std::string& m) : GdualError("Failure(" + r + "): " + m), reason(std::move(r)) {}
};
struct DimensionNotDivisible : GdualError {
  explicit DimensionNotDivisible(const std::string& m) : GdualError("DimensionNotDivisible: " + m) {}
};
struct ConjugatorNotFound : GdualError {
  explicit ConjugatorNotFound(const std::string& m) : GdualError("ConjugatorNotFound: " + m) {}
};
struct TwistedActionInvalid : GdualError {
  explicit TwistedActionInvalid(const std::string& m) : GdualError("TwistedActionInvalid: " + m) {}
};
struct TraceNotQuantized : GdualError {
  explicit TraceNotQuantized(const std::string& m) : GdualError("TraceNotQuantized: " + m) {}
};
struct BoundViolated : GdualError {
  explicit BoundViolated(const std::string& m) : GdualError("BoundViolated: " + m) {}
};
struct SingularInput : GdualError {
  explicit SingularInput(const std::string& m) : GdualError("SingularInput: " + m) {}
};
struct IncompatibleSystems : GdualError {
  explicit IncompatibleSystems(const std::string& m) : GdualError("IncompatibleSystems: " + m) {}
};
struct CapExceeded : GdualError {
  explicit CapExceeded(const std::string& m) : GdualError("CapExceeded: " + m) {}
};
struct InvalidMatrixUnits : GdualError {
  explicit InvalidMatrixUnits(const std::string& m) : GdualError("InvalidMatrixUnits: " + m) {}
};
struct NotDoubleAction : GdualError {
  explicit NotDoubleAction(const std::string& m) : GdualError("NotDoubleAction: " + m) {}
};
struct ParseError : GdualError {
  explicit ParseError(const std::string& m) : GdualError("ParseError: " + m) {}
};

}  // namespace gdual

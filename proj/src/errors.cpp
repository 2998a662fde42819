#include "pitslab/errors.hpp"

namespace pitslab {

void rethrow_labelled(const Error& e, const std::string& label) {
  const std::string what = label + ": " + e.what();
  switch (e.kind()) {
    case ErrorKind::Parameter: throw ParameterError(what);
    case ErrorKind::Capacity: throw CapacityError(what);
    case ErrorKind::Contract: throw ContractError(what);
    case ErrorKind::Certification: throw CertificationError(what);
    case ErrorKind::Diagnostic: throw DiagnosticError(what);
  }
  throw Error(e.kind(), what);
}

}  // namespace pitslab

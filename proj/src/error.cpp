// SPDX-License-Identifier: Apache-2.0
#include "helio/error.hpp"

namespace helio {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::ParseError: return "ParseError";
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::DirtyData: return "DirtyData";
    case Errc::ConstantColumn: return "ConstantColumn";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::BadK: return "BadK";
    case Errc::ConstantVector: return "ConstantVector";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptySelection: return "EmptySelection";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::BadRound: return "BadRound";
    case Errc::BadArchitecture: return "BadArchitecture";
    case Errc::Diverged: return "Diverged";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::SingularKernel: return "SingularKernel";
    case Errc::TooManyFeatures: return "TooManyFeatures";
    case Errc::Empty: return "Empty";
    case Errc::ConstantActual: return "ConstantActual";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::NotATreeModel: return "NotATreeModel";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

ErrorClass error_class(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidConfig:
    case Errc::OutOfDomain:
    case Errc::BadK:
    case Errc::BadArchitecture:
    case Errc::NotATreeModel:
      return ErrorClass::config;
    case Errc::TooFewSamples:
    case Errc::BadRound:
    case Errc::Diverged:
    case Errc::SingularKernel:
    case Errc::TooManyFeatures:
      return ErrorClass::training;
    default:
      return ErrorClass::data;
  }
}

Error Error::with_context(std::string_view prefix) const {
  std::string msg(prefix);
  msg += ": ";
  msg += what();
  Error out(code_, msg);
  out.row_ = row_;
  out.col_ = col_;
  return out;
}

}  // namespace helio

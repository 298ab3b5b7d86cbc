// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace helio {

enum class Errc {
  MissingColumn,
  ParseError,
  EmptyFile,
  DirtyData,
  ConstantColumn,
  DimensionMismatch,
  TooFewRows,
  BadK,
  ConstantVector,
  LengthMismatch,
  EmptySelection,
  TooFewSamples,
  BadRound,
  BadArchitecture,
  Diverged,
  OutOfDomain,
  SingularKernel,
  TooManyFeatures,
  Empty,
  ConstantActual,
  SchemaMismatch,
  NotATreeModel,
  InvalidConfig,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

// Process exit class used by the command-line front end.
enum class ErrorClass { config = 2, data = 3, training = 4 };

ErrorClass error_class(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Error(Errc code, const std::string& what, std::size_t row, std::optional<std::size_t> col = {})
      : std::runtime_error(what), code_(code), row_(row), col_(col) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> row() const noexcept { return row_; }
  std::optional<std::size_t> col() const noexcept { return col_; }

  // Copy of this error with a context prefix ("fold 2: ...", "stage train: ...").
  Error with_context(std::string_view prefix) const;

 private:
  Errc code_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> col_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace helio

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rst {

enum class ErrorCode {
  MalformedXml,
  DanglingParent,
  MultipleRoots,
  UnknownRelation,
  MissingTree,
  ParseError,
  NonBinaryTree,
  NonBinaryMononuclear,
  BadColumnCount,
  NonIntegerHead,
  AlignmentMismatch,
  BadBitstring,
  IndexOutOfRange,
  DegenerateLabels,
  LengthMismatch,
  IllegalAction,
  EmptyTreebank,
  DimensionMismatch,
  LeafMismatch,
  BadConfig,
  BadModelFile,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this type. `position` is a
// line number, character offset or token index depending on the code, or
// npos when it does not apply.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(ErrorCode code, const std::string& what, std::size_t position = npos)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        position_(position),
        detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }
  std::size_t position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::size_t position_;
  std::string detail_;
};

}  // namespace rst

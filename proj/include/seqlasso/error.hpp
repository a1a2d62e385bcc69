#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace seqlasso {

enum class ErrorCode {
    InvalidArgument,
    NonFinite,
    ConstantColumn,
    RankDeficient,
    Collinear,
    NothingToSelect,
    PerfectFit,
    EmptyRemainder,
    InvalidRho,
    NonNumericColumn,
    DuplicateHeader,
    MissingColumn,
    Config,
    Io,
};

const char* to_string(ErrorCode code);

// Every failure surfaced by the library. `index` names the offending feature
// when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what,
          std::optional<std::ptrdiff_t> index = std::nullopt)
        : std::runtime_error(what), code_(code), index_(index) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::ptrdiff_t> index() const noexcept { return index_; }

private:
    ErrorCode code_;
    std::optional<std::ptrdiff_t> index_;
};

}  // namespace seqlasso

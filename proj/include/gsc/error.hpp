#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gsc {

enum class Errc {
    FileNotFound,
    UnsupportedFormat,
    MalformedHeader,
    UnsupportedMaxval,
    TruncatedPayload,
    Unwritable,
    DimensionMismatch,
    OutOfBounds,
    InvalidArgument,
    NonFinite,
    EmptyMask,
    TooFewCandidates,
    ImageTooSmall,
    MalformedData,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::UnsupportedMaxval: return "UnsupportedMaxval";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::Unwritable: return "Unwritable";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonFinite: return "NonFinite";
    case Errc::EmptyMask: return "EmptyMask";
    case Errc::TooFewCandidates: return "TooFewCandidates";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::MalformedData: return "MalformedData";
    }
    return "Unknown";
}

/// Library-wide exception. `code()` identifies the failure class; `what()`
/// carries the code name followed by a human-readable detail.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail),
          code_{code} {}

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

namespace detail {
inline void require(bool cond, Errc code, const std::string &detail) {
    if (!cond)
        throw Error(code, detail);
}
} // namespace detail

} // namespace gsc

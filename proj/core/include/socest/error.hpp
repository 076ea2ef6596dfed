/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace socest {

enum class ErrorKind {
    InvalidArgument,
    InvalidCoeffs,
    NonPhysical,
    Degenerate,
    IllConditioned,
    SingularInnovation,
    RiccatiBlowup,
    EmptyWindow,
    LengthMismatch,
    EmptyInput,
    MissingReferenceSource,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-checkable kind; the message is for humans only.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace socest

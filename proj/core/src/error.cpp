/*
 * Copyright (c) The socest Contributors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "socest/error.hpp"

namespace socest {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidCoeffs: return "InvalidCoeffs";
    case ErrorKind::NonPhysical: return "NonPhysical";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::SingularInnovation: return "SingularInnovation";
    case ErrorKind::RiccatiBlowup: return "RiccatiBlowup";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::MissingReferenceSource: return "MissingReferenceSource";
    }
    return "Unknown";
}

}  // namespace socest

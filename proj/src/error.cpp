// SPDX-License-Identifier: Apache-2.0

#include "arraydpd/error.hpp"

namespace arraydpd {

std::string_view category_name(ErrorCategory c) noexcept
{
    switch (c) {
    case ErrorCategory::invalid_config: return "invalid-config";
    case ErrorCategory::incommensurable_rates: return "incommensurable-rates";
    case ErrorCategory::sync_failure: return "sync-failure";
    case ErrorCategory::insufficient_length: return "insufficient-length";
    case ErrorCategory::length_too_short: return "length-too-short";
    case ErrorCategory::signal_too_short: return "signal-too-short";
    case ErrorCategory::size_mismatch: return "size-mismatch";
    case ErrorCategory::bandwidth_exceeds_nyquist: return "bandwidth-exceeds-nyquist";
    case ErrorCategory::invalid_argument: return "invalid-argument";
    case ErrorCategory::config_parse: return "config-parse";
    case ErrorCategory::io: return "io";
    }
    return "unknown";
}

int exit_code(ErrorCategory c) noexcept
{
    return 10 + static_cast<int>(c);
}

}  // namespace arraydpd

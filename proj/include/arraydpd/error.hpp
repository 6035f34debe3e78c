// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arraydpd {

enum class ErrorCategory {
    invalid_config,
    incommensurable_rates,
    sync_failure,
    insufficient_length,
    length_too_short,
    signal_too_short,
    size_mismatch,
    bandwidth_exceeds_nyquist,
    invalid_argument,
    config_parse,
    io,
};

/// Machine-readable name, e.g. "sync-failure".
std::string_view category_name(ErrorCategory c) noexcept;

/// Process exit code used by the CLI for each category (always nonzero).
int exit_code(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

}  // namespace arraydpd

/*
 * SPDX-License-Identifier: Apache-2.0
 */

#include "ufs/error.hpp"

namespace ufs
{
    const char *to_string(ErrorKind kind)
    {
        switch (kind) {
            case ErrorKind::ordering: return "ordering";
            case ErrorKind::parse: return "parse";
            case ErrorKind::parameter: return "parameter";
            case ErrorKind::config: return "config";
            case ErrorKind::not_ready: return "not-ready";
            case ErrorKind::range: return "range";
            case ErrorKind::stale_data: return "stale-data";
            case ErrorKind::divergence: return "divergence";
            case ErrorKind::actuation: return "actuation";
            case ErrorKind::hardware_reject: return "hardware-reject";
            case ErrorKind::counter_reset: return "counter-reset";
            case ErrorKind::source: return "source";
        }
        return "unknown";
    }
}

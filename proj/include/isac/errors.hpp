// SPDX-License-Identifier: Apache-2.0
//
// isac-uav: beam-pattern synthesis and learned beamforming for sensing/communication UAVs
// Copyright (C) 2026 The isac-uav authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef ISAC_ERRORS_HPP
#define ISAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace isac
{
    enum class ErrorCode
    {
        invalid_config,
        degenerate_geometry,
        dimension_mismatch,
        null_conflict,
        infeasible,
        empty_input,
        io,
        parse
    };

    inline const char *to_string(ErrorCode code)
    {
        switch (code)
        {
        case ErrorCode::invalid_config:
            return "invalid_config";
        case ErrorCode::degenerate_geometry:
            return "degenerate_geometry";
        case ErrorCode::dimension_mismatch:
            return "dimension_mismatch";
        case ErrorCode::null_conflict:
            return "null_conflict";
        case ErrorCode::infeasible:
            return "infeasible";
        case ErrorCode::empty_input:
            return "empty_input";
        case ErrorCode::io:
            return "io";
        case ErrorCode::parse:
            return "parse";
        }
        return "unknown";
    }

    // All library failures are reported through this type; code() is stable for machine consumption
    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}
        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

} // namespace isac

#endif

// Copyright 2026 The incompat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// Command-line front end. Exit codes: 0 success, 2 input error (parsing,
/// schema, ranges), 3 solver failure.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "incompat/config.hpp"
#include "incompat/io.hpp"

namespace incompat {

/// Robustness of one subset of the assemblage in `file`; prints eta* to six
/// decimals plus the certificate bound and gap.
int cmd_robustness(const std::string& file, const std::vector<int>& subset, ReportFormat format,
                   const Tolerances& tol, std::ostream& out, std::ostream& err);

/// Applies uniform or per-measurement noise, then emits the full hierarchy
/// report. At most one of `eta` / `eta_per_x` may be set.
int cmd_hierarchy(const std::string& file, std::optional<double> eta,
                  const std::optional<std::vector<double>>& eta_per_x, ReportFormat format,
                  const Tolerances& tol, std::ostream& out, std::ostream& err);

/// Classification table for the noisy qubit MUB trio over an eta grid
/// {i/steps : i = 1..steps}.
int cmd_mub_demo(int steps, const Tolerances& tol, std::ostream& out, std::ostream& err);

/// Writes the canonical MUB-trio assemblage file (a convenient starting
/// input for the other commands).
int cmd_make_mub(const std::string& path, std::ostream& err);

/// Full argv front end over the commands above.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace incompat

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

/// Assemblage files and report rendering.
///
/// Assemblage file (JSON): {"format_version": "1", "dimension": d,
/// "measurements": [{"label": text, "effects": [matrix, ...]}, ...]} where a
/// matrix is a row-major d x d array of [re, im] pairs. Values are written
/// with 12 significant digits, so a save/load round trip reproduces every
/// entry to that precision. Reports render numbers to 6 decimals with a fixed
/// key order, so identical inputs produce byte-identical output.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "incompat/hierarchy.hpp"

namespace incompat {

enum class ReportFormat { Json, Csv };

Assemblage assemblage_from_json(const std::string& text);
std::string assemblage_to_json(const Assemblage& a);

/// Throws ParseError naming the offending field (with its path) on schema
/// violations, including measurements that fail POVM validation.
Assemblage load_assemblage(const std::string& path);
void save_assemblage(const Assemblage& a, const std::string& path);

/// FNV-1a 64-bit digest, rendered as "fnv1a64:<16 hex digits>".
std::string fnv1a64(std::string_view bytes);

/// Loads the raw bytes of a file (ParseError when unreadable).
std::string read_file(const std::string& path);

struct ReportContext {
  std::string input_digest;
  std::vector<double> applied_noise;  ///< per measurement, after flag handling
};

std::string render_robustness(const RobustnessResult& r, ReportFormat format);
std::string render_hierarchy(const HierarchyReport& rep, const ReportContext& ctx,
                             ReportFormat format);

struct MubDemoRow {
  double eta;
  CompatibilityLabel at_k2;
  CompatibilityLabel at_k3;
};

/// Fixed-width text table of the demo grid.
std::string render_mub_demo(const std::vector<MubDemoRow>& rows);

// Deterministic number formatting shared by every renderer.
std::string fmt_fixed6(double v);  ///< printf %.6f
std::string fmt_sci6(double v);    ///< printf %.6e
std::string fmt_g12(double v);     ///< printf %.12g

}  // namespace incompat

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

#include "incompat/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace incompat {

namespace {

using nlohmann::json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

double number_at(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      size_t used = 0;
      const std::string s = v.get<std::string>();
      const double parsed = std::stod(s, &used);
      if (used == s.size()) return parsed;
    } catch (...) {
    }
  }
  throw ParseError(path + ": expected a number");
}

std::string subset_members_string(const SubsetIndex& s) {
  std::string out;
  for (size_t i = 0; i < s.members().size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(s.members()[i]);
  }
  return out;
}

}  // namespace

std::string fmt_fixed6(double v) { return fmt("%.6f", v); }
std::string fmt_sci6(double v) { return fmt("%.6e", v); }
std::string fmt_g12(double v) { return fmt("%.12g", v); }

std::string fnv1a64(std::string_view bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Assemblage assemblage_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("top level: expected an object");
  if (!root.contains("dimension")) throw ParseError("missing field: dimension");
  if (!root["dimension"].is_number_integer())
    throw ParseError("dimension: expected an integer");
  const int d = root["dimension"].get<int>();
  if (d < 1 || d > 8) throw ParseError("dimension: must be in [1, 8]");
  if (!root.contains("measurements")) throw ParseError("missing field: measurements");
  const json& ms = root["measurements"];
  if (!ms.is_array() || ms.empty())
    throw ParseError("measurements: expected a nonempty array");

  std::vector<Povm> povms;
  for (size_t mi = 0; mi < ms.size(); ++mi) {
    const std::string mpath = "measurements[" + std::to_string(mi) + "]";
    const json& m = ms[mi];
    if (!m.is_object()) throw ParseError(mpath + ": expected an object");
    std::string label;
    if (m.contains("label")) {
      if (!m["label"].is_string()) throw ParseError(mpath + ".label: expected a string");
      label = m["label"].get<std::string>();
    }
    if (!m.contains("effects")) throw ParseError(mpath + ": missing field: effects");
    const json& effs = m["effects"];
    if (!effs.is_array() || effs.empty())
      throw ParseError(mpath + ".effects: expected a nonempty array");

    std::vector<HermitianOperator> effects;
    for (size_t ei = 0; ei < effs.size(); ++ei) {
      const std::string epath = mpath + ".effects[" + std::to_string(ei) + "]";
      const json& mat = effs[ei];
      if (!mat.is_array() || static_cast<int>(mat.size()) != d)
        throw ParseError(epath + ": expected " + std::to_string(d) + " rows");
      std::vector<Complex> entries;
      entries.reserve(static_cast<size_t>(d) * d);
      for (int r = 0; r < d; ++r) {
        const json& row = mat[r];
        const std::string rpath = epath + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<int>(row.size()) != d)
          throw ParseError(rpath + ": expected " + std::to_string(d) + " entries");
        for (int c = 0; c < d; ++c) {
          const json& cell = row[c];
          const std::string cpath = rpath + "[" + std::to_string(c) + "]";
          if (!cell.is_array() || cell.size() != 2)
            throw ParseError(cpath + ": expected an [re, im] pair");
          entries.emplace_back(number_at(cell[0], cpath + "[0]"),
                               number_at(cell[1], cpath + "[1]"));
        }
      }
      try {
        effects.push_back(HermitianOperator::from_entries(d, entries));
      } catch (const Error& e) {
        throw ParseError(epath + ": " + e.what());
      }
    }
    Povm povm(std::move(effects), label);
    const auto violations = validate(povm);
    if (!violations.empty()) {
      const PovmViolation& v = violations.front();
      std::string where = mpath;
      if (v.effect_index >= 0) where += ".effects[" + std::to_string(v.effect_index) + "]";
      throw ParseError(where + ": " + v.what + " (defect " + fmt_sci6(v.magnitude) + ")");
    }
    povms.push_back(std::move(povm));
  }
  return Assemblage(std::move(povms));
}

std::string assemblage_to_json(const Assemblage& a) {
  std::string out;
  out += "{\n  \"format_version\": \"1\",\n";
  out += "  \"dimension\": " + std::to_string(a.dim()) + ",\n";
  out += "  \"measurements\": [\n";
  for (int x = 0; x < a.size(); ++x) {
    const Povm& m = a.measurement(x);
    out += "    {\n      \"label\": \"" + json_escape(m.label()) + "\",\n";
    out += "      \"effects\": [\n";
    for (int e = 0; e < m.outcome_count(); ++e) {
      out += "        [";
      for (int r = 0; r < a.dim(); ++r) {
        if (r) out += ",\n         ";
        out += "[";
        for (int c = 0; c < a.dim(); ++c) {
          const Complex z = m.effect(e)(r, c);
          if (c) out += ", ";
          out += "[" + fmt_g12(z.real()) + ", " + fmt_g12(z.imag()) + "]";
        }
        out += "]";
      }
      out += "]";
      out += (e + 1 < m.outcome_count()) ? ",\n" : "\n";
    }
    out += "      ]\n    }";
    out += (x + 1 < a.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

Assemblage load_assemblage(const std::string& path) {
  return assemblage_from_json(read_file(path));
}

void save_assemblage(const Assemblage& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << assemblage_to_json(a);
}

std::string render_robustness(const RobustnessResult& r, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Json) {
    out += "{\n  \"subset\": [";
    for (size_t i = 0; i < r.subset.members().size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(r.subset.members()[i]);
    }
    out += "],\n";
    out += "  \"eta_star\": " + fmt_fixed6(r.eta_star) + ",\n";
    out += "  \"certificate_bound\": " + fmt_fixed6(r.certificate.bound) + ",\n";
    out += "  \"gap\": " + fmt_sci6(r.gap) + ",\n";
    out += "  \"iterations\": " + std::to_string(r.iterations) + ",\n";
    out += std::string("  \"parent_at_interior\": ") +
           (r.parent_at_interior ? "true" : "false") + "\n}\n";
  } else {
    out += "subset,eta_star,certificate_bound,gap,iterations,parent_at_interior\n";
    out += "\"" + subset_members_string(r.subset) + "\"," + fmt_fixed6(r.eta_star) + "," +
           fmt_fixed6(r.certificate.bound) + "," + fmt_sci6(r.gap) + "," +
           std::to_string(r.iterations) + "," + (r.parent_at_interior ? "true" : "false") + "\n";
  }
  return out;
}

std::string render_hierarchy(const HierarchyReport& rep, const ReportContext& ctx,
                             ReportFormat format) {
  int total_solves = 0;
  long long total_iterations = 0;
  double max_gap = 0.0;
  for (const auto& lvl : rep.levels) {
    for (const auto& s : lvl.per_subset) {
      ++total_solves;
      total_iterations += s.iterations;
      max_gap = std::max(max_gap, std::abs(s.gap));
    }
  }

  std::string out;
  if (format == ReportFormat::Json) {
    out += "{\n  \"format_version\": \"1\",\n";
    out += "  \"input_digest\": \"" + json_escape(ctx.input_digest) + "\",\n";
    out += "  \"n\": " + std::to_string(rep.n) + ",\n";
    out += "  \"dimension\": " + std::to_string(rep.dim) + ",\n";
    out += "  \"applied_noise\": [";
    for (size_t i = 0; i < ctx.applied_noise.size(); ++i) {
      if (i) out += ", ";
      out += fmt_fixed6(ctx.applied_noise[i]);
    }
    out += "],\n  \"levels\": [\n";
    for (size_t li = 0; li < rep.levels.size(); ++li) {
      const HierarchyLevel& lvl = rep.levels[li];
      const LevelClassification& cls = rep.labels[li];
      out += "    {\n      \"k\": " + std::to_string(lvl.k) + ",\n";
      out += "      \"eta_min\": " + fmt_fixed6(lvl.eta_min) + ",\n";
      out += "      \"eta_max\": " + fmt_fixed6(lvl.eta_max) + ",\n";
      out += std::string("      \"label\": \"") + label_name(cls.label) + "\",\n";
      out += std::string("      \"genuinely_incompatible\": ") +
             (cls.genuinely_incompatible ? "true" : "false") + ",\n";
      out += std::string("      \"genuinely_strong_incompatible\": ") +
             (cls.genuinely_strong_incompatible ? "true" : "false") + ",\n";
      out += "      \"per_subset\": [\n";
      for (size_t si = 0; si < lvl.per_subset.size(); ++si) {
        const SubsetRobustness& s = lvl.per_subset[si];
        out += "        {\"subset\": [";
        for (size_t i = 0; i < s.subset.members().size(); ++i) {
          if (i) out += ", ";
          out += std::to_string(s.subset.members()[i]);
        }
        out += "], \"eta_star\": " + fmt_fixed6(s.eta_star) + ", \"bound\": " +
               fmt_fixed6(s.bound) + ", \"gap\": " + fmt_sci6(s.gap) +
               ", \"iterations\": " + std::to_string(s.iterations) + "}";
        out += (si + 1 < lvl.per_subset.size()) ? ",\n" : "\n";
      }
      out += "      ]\n    }";
      out += (li + 1 < rep.levels.size()) ? ",\n" : "\n";
    }
    out += "  ],\n  \"genuine_strong_windows\": [";
    for (size_t wi = 0; wi < rep.windows.size(); ++wi) {
      if (wi) out += ", ";
      out += "{\"k\": " + std::to_string(rep.windows[wi].k) + ", \"eta_low\": " +
             fmt_fixed6(rep.windows[wi].eta_low) + ", \"eta_high\": " +
             fmt_fixed6(rep.windows[wi].eta_high) + "}";
    }
    out += "],\n";
    out += std::string("  \"overall_compatible\": ") +
           (rep.overall_compatible ? "true" : "false") + ",\n";
    out += "  \"solver\": {\"total_solves\": " + std::to_string(total_solves) +
           ", \"total_iterations\": " + std::to_string(total_iterations) +
           ", \"max_gap\": " + fmt_sci6(max_gap) + "}\n}\n";
  } else {
    out += "# incompat hierarchy report v1\n";
    out += "meta,input_digest,n,dimension,applied_noise\n";
    out += "meta," + ctx.input_digest + "," + std::to_string(rep.n) + "," +
           std::to_string(rep.dim) + ",";
    for (size_t i = 0; i < ctx.applied_noise.size(); ++i) {
      if (i) out += '|';
      out += fmt_fixed6(ctx.applied_noise[i]);
    }
    out += "\nsubset,k,members,eta_star,bound,gap,iterations\n";
    for (const auto& lvl : rep.levels)
      for (const auto& s : lvl.per_subset)
        out += "subset," + std::to_string(lvl.k) + "," + subset_members_string(s.subset) + "," +
               fmt_fixed6(s.eta_star) + "," + fmt_fixed6(s.bound) + "," + fmt_sci6(s.gap) + "," +
               std::to_string(s.iterations) + "\n";
    out += "level,k,eta_min,eta_max,label,genuinely_incompatible,genuinely_strong_incompatible\n";
    for (size_t li = 0; li < rep.levels.size(); ++li) {
      const HierarchyLevel& lvl = rep.levels[li];
      const LevelClassification& cls = rep.labels[li];
      out += "level," + std::to_string(lvl.k) + "," + fmt_fixed6(lvl.eta_min) + "," +
             fmt_fixed6(lvl.eta_max) + "," + label_name(cls.label) + "," +
             (cls.genuinely_incompatible ? "true" : "false") + "," +
             (cls.genuinely_strong_incompatible ? "true" : "false") + "\n";
    }
    out += "window,k,eta_low,eta_high\n";
    for (const auto& w : rep.windows)
      out += "window," + std::to_string(w.k) + "," + fmt_fixed6(w.eta_low) + "," +
             fmt_fixed6(w.eta_high) + "\n";
    out += "summary,overall_compatible,total_solves,total_iterations,max_gap\n";
    out += std::string("summary,") + (rep.overall_compatible ? "true" : "false") + "," +
           std::to_string(total_solves) + "," + std::to_string(total_iterations) + "," +
           fmt_sci6(max_gap) + "\n";
  }
  return out;
}

std::string render_mub_demo(const std::vector<MubDemoRow>& rows) {
  std::string out = "eta      k=2                      k=3\n";
  for (const auto& row : rows) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.6f %-24s %s\n", row.eta, label_name(row.at_k2),
                  label_name(row.at_k3));
    out += buf;
  }
  return out;
}

}  // namespace incompat

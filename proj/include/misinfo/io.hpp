// Copyright 2026 The Misinfo Dropout Authors.
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

// File formats: partitions, block matrices, cascade JSONL, solver reports,
// experiment configs (JSON or TOML, same schema), CSV tables and SVG heatmaps.

#ifndef MISINFO_IO_HPP_
#define MISINFO_IO_HPP_

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "misinfo/harness.hpp"
#include "toml.hpp"

namespace misinfo::io {

using nlohmann::json;

// Malformed or unreadable input. Maps to CLI exit code 3.
class SchemaError : public IoError {
 public:
  using IoError::IoError;
};

// Shortest round-trip decimal form; stable across runs.
inline std::string num(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(detail::concat("cannot read ", path.string()));
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(detail::concat("cannot write ", path.string()));
  out << content;
  if (!out) throw IoError(detail::concat("write failed for ", path.string()));
}

// Parses JSON, or TOML when the path ends in .toml; TOML is converted to the
// equivalent JSON document so both share one schema.
inline json parse_document(const std::string& text, bool toml_syntax, const std::string& origin) {
  try {
    if (toml_syntax) {
      const toml::table tbl = toml::parse(text, origin);
      std::ostringstream os;
      os << toml::json_formatter{tbl};
      return json::parse(os.str());
    }
    return json::parse(text);
  } catch (const toml::parse_error& e) {
    throw SchemaError(detail::concat(origin, ": ", e.description()));
  } catch (const json::exception& e) {
    throw SchemaError(detail::concat(origin, ": ", e.what()));
  }
}

inline json load_document(const std::filesystem::path& path) {
  return parse_document(read_file(path), path.extension() == ".toml", path.string());
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(detail::concat("field '", key, "': ", e.what()));
  }
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(detail::concat("missing field '", key, "'"));
  return get_or<T>(j, key, T{});
}

// --- partitions and block matrices ------------------------------------------

inline Partition partition_from_json(const json& j) {
  try {
    if (j.contains("sizes")) return Partition::from_sizes(require<std::vector<std::size_t>>(j, "sizes"));
    if (j.contains("class_of"))
      return Partition::from_class_of(require<std::vector<ClassIndex>>(j, "class_of"));
  } catch (const InvalidArgument& e) {
    throw SchemaError(detail::concat("partition: ", e.what()));
  }
  throw SchemaError("partition needs 'sizes' or 'class_of'");
}

// Contiguous partitions are written in the compact sizes form.
inline json partition_to_json(const Partition& p) {
  bool contiguous = true;
  for (std::size_t i = 1; i < p.num_nodes(); ++i)
    if (p.class_of()[i] < p.class_of()[i - 1]) contiguous = false;
  if (contiguous) return json{{"sizes", p.sizes()}};
  return json{{"class_of", p.class_of()}};
}

inline BlockMatrix matrix_from_json(const json& rows) {
  try {
    return BlockMatrix::from_rows(rows.get<std::vector<std::vector<double>>>());
  } catch (const json::exception& e) {
    throw SchemaError(detail::concat("matrix: ", e.what()));
  } catch (const InvalidArgument& e) {
    throw SchemaError(detail::concat("matrix: ", e.what()));
  }
}

inline BlockMatrix block_from_json(const json& j) {
  if (!j.contains("block")) throw SchemaError("SBM file needs 'block'");
  return matrix_from_json(j.at("block"));
}

inline json block_to_json(const BlockMatrix& m) { return json{{"block", m.rows()}}; }

// --- records -----------------------------------------------------------------

inline json to_json(const CascadeRecord& r) {
  json j{{"seeds", r.seeds}, {"steps", r.steps}, {"r_inf", r.r_infinity}};
  if (!r.transfers.empty()) {
    json tr = json::array();
    for (const auto& t : r.transfers) tr.push_back({t.from, t.to, t.step});
    j["transfers"] = std::move(tr);
  }
  return j;
}

inline CascadeRecord cascade_from_json(const json& j) {
  CascadeRecord r;
  r.seeds = require<std::vector<NodeId>>(j, "seeds");
  r.steps = require<std::vector<std::vector<std::size_t>>>(j, "steps");
  r.r_infinity = require<std::size_t>(j, "r_inf");
  r.terminated_at = r.steps.empty() ? 0 : r.steps.size() - 1;
  if (j.contains("transfers")) {
    for (const auto& t : j.at("transfers")) {
      if (!t.is_array() || t.size() != 3) throw SchemaError("transfer entries are [from, to, step]");
      r.transfers.push_back({t[0].get<NodeId>(), t[1].get<NodeId>(), t[2].get<std::uint32_t>()});
    }
  }
  return r;
}

inline json to_json(const LabeledCascade& c) {
  json j = to_json(c.record);
  j["label"] = to_string(c.label);
  return j;
}

inline LabeledCascade labeled_cascade_from_json(const json& j) {
  const auto label = get_or<std::string>(j, "label", "");
  if (label != "true" && label != "false")
    throw SchemaError("cascade is missing \"label\": \"true\"|\"false\"");
  return {cascade_from_json(j), label == "true" ? ContentLabel::kTrue : ContentLabel::kFalse};
}

inline json to_json(const SolverReport& r) {
  json j{{"d", r.d_star.matrix().rows()},
         {"objective", r.objective},
         {"constraint", r.constraint_value},
         {"branch", std::string(to_string(r.branch))}};
  if (r.kkt_residual) j["kkt_residual"] = *r.kkt_residual;
  if (r.multiplier) j["multiplier"] = *r.multiplier;
  if (r.lp_objective) {
    j["lp_objective"] = *r.lp_objective;
    j["lp_disagreement"] = r.lp_disagreement;
  }
  return j;
}

inline SolverReport solver_report_from_json(const json& j) {
  SolverReport r;
  r.d_star = DropoutMatrix(matrix_from_json(j.at("d")));
  r.objective = require<double>(j, "objective");
  r.constraint_value = require<double>(j, "constraint");
  const auto b = require<std::string>(j, "branch");
  r.branch = b == "lp" ? Branch::kLp : b == "soft-lp" ? Branch::kSoftLp : b == "convex" ? Branch::kConvex : Branch::kNone;
  if (j.contains("kkt_residual")) r.kkt_residual = j.at("kkt_residual").get<double>();
  if (j.contains("multiplier")) r.multiplier = j.at("multiplier").get<double>();
  if (j.contains("lp_objective")) {
    r.lp_objective = j.at("lp_objective").get<double>();
    r.lp_disagreement = get_or<bool>(j, "lp_disagreement", false);
  }
  return r;
}

inline json to_json(const ControlledRunRecord& r) {
  json j = to_json(r.cascade);
  json reports = json::array();
  for (const auto& rep : r.reports) reports.push_back(to_json(rep));
  j["reports"] = std::move(reports);
  return j;
}

template <typename T>
std::string to_jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& it : items) {
    out += to_json(it).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<LabeledCascade> read_dataset(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<LabeledCascade> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(labeled_cascade_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw SchemaError(detail::concat(path.string(), ":", lineno, ": ", e.what()));
    } catch (const SchemaError& e) {
      throw SchemaError(detail::concat(path.string(), ":", lineno, ": ", e.what()));
    }
  }
  return out;
}

// --- configs -----------------------------------------------------------------

inline ControlConfig control_from_json(const json& j) {
  ControlConfig c;
  c.alpha = get_or<double>(j, "alpha", c.alpha);
  c.lambda = get_or<double>(j, "lambda", c.lambda);
  const auto solver = get_or<std::string>(j, "solver", "lp");
  if (solver == "lp") c.solver = SolverKind::kLpWithSoftFallback;
  else if (solver == "convex") c.solver = SolverKind::kConvex;
  else throw SchemaError(detail::concat("unknown solver '", solver, "' (lp|convex)"));
  c.max_steps = get_or<std::size_t>(j, "max_steps", c.max_steps);
  c.infectious_period = get_or<int>(j, "infectious_period", c.infectious_period);
  c.convex.tolerance = get_or<double>(j, "tolerance", c.convex.tolerance);
  c.convex.max_iterations = get_or<int>(j, "max_iterations", c.convex.max_iterations);
  return c;
}

inline json to_json(const ControlConfig& c) {
  return json{{"alpha", c.alpha},
              {"lambda", c.lambda},
              {"solver", std::string(to_string(c.solver))},
              {"max_steps", c.max_steps},
              {"infectious_period", c.infectious_period}};
}

inline GridAxis axis_from_json(const json& j, GridAxis fallback) {
  if (j.is_null()) return fallback;
  return {get_or<double>(j, "lo", fallback.lo), get_or<double>(j, "hi", fallback.hi),
          get_or<std::size_t>(j, "points", fallback.points)};
}

// Schema:
//   name, partition_sizes, base_matrix (optional; default 0.01 diagonal,
//   0.002 elsewhere), x_range / y_range {lo, hi, points}, trials_per_cell,
//   seeds_per_cascade, master_seed, control {alpha, lambda, solver, ...}
//   (absent or "control" for no alteration).
inline SyntheticConfig synthetic_config_from_json(const json& j) {
  SyntheticConfig c;
  c.name = get_or<std::string>(j, "name", c.name);
  c.partition_sizes = get_or<std::vector<std::size_t>>(j, "partition_sizes", c.partition_sizes);
  c.base = j.contains("base_matrix") ? matrix_from_json(j.at("base_matrix"))
                                     : default_base_matrix(c.partition_sizes.size());
  c.x = axis_from_json(j.value("x_range", json()), c.x);
  c.y = axis_from_json(j.value("y_range", json()), c.y);
  c.trials_per_cell = get_or<std::size_t>(j, "trials_per_cell", c.trials_per_cell);
  c.seeds_per_cascade = get_or<std::size_t>(j, "seeds_per_cascade", c.seeds_per_cascade);
  c.master_seed = get_or<std::uint64_t>(j, "master_seed", c.master_seed);
  if (j.contains("control") && j.at("control").is_object()) c.control = control_from_json(j.at("control"));
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(e.what());
  }
  return c;
}

inline json to_json(const SyntheticConfig& c) {
  json j{{"name", c.name},
         {"partition_sizes", c.partition_sizes},
         {"base_matrix", c.base.rows()},
         {"x_range", {{"lo", c.x.lo}, {"hi", c.x.hi}, {"points", c.x.points}}},
         {"y_range", {{"lo", c.y.lo}, {"hi", c.y.hi}, {"points", c.y.points}}},
         {"trials_per_cell", c.trials_per_cell},
         {"seeds_per_cascade", c.seeds_per_cascade},
         {"master_seed", c.master_seed}};
  j["control"] = c.control ? to_json(*c.control) : json("control");
  return j;
}

// --- tables --------------------------------------------------------------------

inline std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "# config=" << r.config.name << " seeds_per_cascade=" << r.config.seeds_per_cascade
     << " trials_per_cell=" << r.config.trials_per_cell << " master_seed=" << r.config.master_seed
     << " control=" << (r.config.control ? detail::concat("alpha:", num(r.config.control->alpha),
                                                          "/lambda:", num(r.config.control->lambda),
                                                          "/solver:", to_string(r.config.control->solver))
                                         : std::string("none"))
     << "\n# collation=equal-weight-over-valid-cells low_threshold=N/10\n";
  os << "x,y,valid,feasible_t0,lp_first_step_fraction,true_mean,true_mean_se,true_low,true_low_se,"
        "false_mean,false_mean_se,false_low,false_low_se\n";
  std::vector<const SweepCell*> order;
  for (const auto& c : r.cells) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const SweepCell* a, const SweepCell* b) {
    return std::tie(a->x, a->y) < std::tie(b->x, b->y);
  });
  for (const SweepCell* c : order) {
    os << num(c->x) << ',' << num(c->y) << ',' << (c->valid ? 1 : 0) << ',' << (c->feasible_t0 ? 1 : 0)
       << ',' << num(c->lp_first_step_fraction) << ',' << num(c->true_stats.mean_size) << ','
       << num(c->true_stats.mean_size_se) << ',' << num(c->true_stats.low_fraction) << ','
       << num(c->true_stats.low_fraction_se) << ',' << num(c->false_stats.mean_size) << ','
       << num(c->false_stats.mean_size_se) << ',' << num(c->false_stats.low_fraction) << ','
       << num(c->false_stats.low_fraction_se) << '\n';
  }
  return os.str();
}

// One collated summary row per sweep.
inline std::string summary_csv(const std::vector<SweepResult>& sweeps) {
  std::ostringstream os;
  os << "config,partitions,alpha,lambda,true_mean,false_mean,true_low,false_low,cells\n";
  for (const auto& r : sweeps) {
    const auto s = collate(r);
    os << r.config.name << ',' << r.config.partition_sizes.size() << ','
       << (r.config.control ? num(r.config.control->alpha) : "-") << ','
       << (r.config.control ? num(r.config.control->lambda) : "-") << ',' << num(s.true_mean) << ','
       << num(s.false_mean) << ',' << num(s.true_low) << ',' << num(s.false_low) << ',' << s.cells << '\n';
  }
  return os.str();
}

inline std::string pipeline_csv(const PipelineResult& r) {
  std::ostringstream os;
  os << "# classes_after_merge=" << r.merged.partition.num_classes() << " low_threshold=5\n";
  os << "alpha,lambda,true_mean,false_mean,true_low,false_low,true_mean_se,false_mean_se,"
        "true_recorded_mean,false_recorded_mean\n";
  for (const auto& row : r.rows) {
    os << (row.control ? num(row.control->alpha) : "-") << ','
       << (row.control ? num(row.control->lambda) : "-") << ',' << num(row.true_stats.mean_size) << ','
       << num(row.false_stats.mean_size) << ',' << num(row.true_stats.low_fraction) << ','
       << num(row.false_stats.low_fraction) << ',' << num(row.true_stats.mean_size_se) << ','
       << num(row.false_stats.mean_size_se) << ',' << num(row.true_recorded_mean) << ','
       << num(row.false_recorded_mean) << '\n';
  }
  return os.str();
}

inline json fit_to_json(const BlockEstimate& e, const Partition& partition) {
  auto pairs = [](const std::vector<std::pair<std::size_t, std::size_t>>& v) {
    json a = json::array();
    for (const auto& [u, w] : v) a.push_back({u, w});
    return a;
  };
  return json{{"partition", partition_to_json(partition)},
              {"b_plus", e.models.g_plus.block().rows()},
              {"b_minus", e.models.g_minus.block().rows()},
              {"opportunities_plus", e.plus.opportunities.rows()},
              {"opportunities_minus", e.minus.opportunities.rows()},
              {"successes_plus", e.plus.successes.rows()},
              {"successes_minus", e.minus.successes.rows()},
              {"cascades_plus", e.plus.cascades},
              {"cascades_minus", e.minus.cascades},
              {"unobserved_plus", pairs(e.unobserved_plus)},
              {"unobserved_minus", pairs(e.unobserved_minus)}};
}

// Heatmap of the mean normalized cascade size over the (x, y) grid, x along
// the horizontal axis. Grey cells are invalid.
inline std::string sweep_svg(const SweepResult& r, ContentLabel which) {
  const std::size_t nx = r.config.x.points, ny = r.config.y.points;
  constexpr int kCell = 24, kMargin = 40;
  const int w = static_cast<int>(nx) * kCell + 2 * kMargin;
  const int h = static_cast<int>(ny) * kCell + 2 * kMargin;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<text x=\"" << kMargin << "\" y=\"20\" font-size=\"12\">" << r.config.name << " "
     << to_string(which) << " content, mean R_inf/N</text>\n";
  for (const auto& c : r.cells) {
    const int px = kMargin + static_cast<int>(c.ix) * kCell;
    const int py = kMargin + static_cast<int>(ny - 1 - c.iy) * kCell;
    std::string fill = "#bbbbbb";
    if (c.valid) {
      const double v = std::clamp(
          which == ContentLabel::kTrue ? c.true_stats.mean_size : c.false_stats.mean_size, 0.0, 1.0);
      const int red = static_cast<int>(std::lround(255 * v));
      const int blue = 255 - red;
      char buf[8];
      std::snprintf(buf, sizeof buf, "#%02x%02x%02x", red, 32, blue);
      fill = buf;
    }
    os << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << kCell << "\" height=\"" << kCell
       << "\" fill=\"" << fill << "\"><title>x=" << num(c.x) << " y=" << num(c.y) << "</title></rect>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace misinfo::io

#endif  // MISINFO_IO_HPP_

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "granmilp/analysis.hpp"
#include "granmilp/async_sim.hpp"
#include "granmilp/errors.hpp"
#include "granmilp/milp.hpp"
#include "granmilp/relaxation.hpp"
#include "granmilp/sparse.hpp"

namespace granmilp::io {

using Json = nlohmann::ordered_json;

struct SourcePos {
  std::size_t line = 0;
  std::size_t column = 0;
};

inline SourcePos position_of_offset(std::string_view text, std::size_t offset) {
  SourcePos p{1, 1};
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

/// Position of the key at `path` (object keys from the root), found by a
/// token scan of the source. Returns {0, 0} when the key is absent.
inline SourcePos locate_key(std::string_view text, const std::vector<std::string>& path) {
  std::vector<std::string> stack;  // key under which each open container sits
  std::string pending;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (ch == '"') {
      const std::size_t start = i++;
      std::string s;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        s += text[i++];
      }
      ++i;
      std::size_t j = i;
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == ':') {
        pending = s;
        if (stack.size() == path.size() && !path.empty()) {
          bool match = s == path.back();
          for (std::size_t k = 1; k < stack.size() && match; ++k) match = stack[k] == path[k - 1];
          if (match) return position_of_offset(text, start);
        }
        i = j + 1;
      }
      continue;
    }
    if (ch == '{' || ch == '[') {
      stack.push_back(pending);
      pending.clear();
    } else if ((ch == '}' || ch == ']') && !stack.empty()) {
      stack.pop_back();
    } else if (ch == ',') {
      pending.clear();
    }
    ++i;
  }
  return {};
}

/// Reads a JSON document, turning syntax errors into ParseError with a position.
inline Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const SourcePos p = position_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto k = msg.find("syntax error"); k != std::string::npos) msg = msg.substr(k);
    throw ParseError(msg, p.line, p.column);
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Validation, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Validation, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Validation, "write failed for " + path.string());
}

namespace detail {

class ProblemReader {
 public:
  ProblemReader(std::string_view text, const Json& doc) : text_(text), doc_(doc) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& what) const {
    SourcePos p = locate_key(text_, path);
    std::vector<std::string> parent = path;
    while (p.line == 0 && parent.size() > 1) {
      parent.pop_back();
      p = locate_key(text_, parent);
    }
    throw ParseError(join(path) + ": " + what, p.line, p.column);
  }

  const Json* find(const std::vector<std::string>& path) const {
    const Json* cur = &doc_;
    for (const auto& k : path) {
      if (!cur->is_object()) return nullptr;
      auto it = cur->find(k);
      if (it == cur->end()) return nullptr;
      cur = &*it;
    }
    return cur;
  }

  const Json& need(const std::vector<std::string>& path) const {
    const Json* j = find(path);
    if (!j) {
      SourcePos p = path.size() > 1 ? locate_key(text_, {path.begin(), path.end() - 1}) : SourcePos{1, 1};
      throw ParseError("missing key \"" + join(path) + "\"", p.line, p.column);
    }
    return *j;
  }

  std::size_t count(const std::vector<std::string>& path) const {
    const Json& j = need(path);
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0) fail(path, "expected a nonnegative integer");
    return j.get<std::size_t>();
  }

  std::vector<double> reals(const std::vector<std::string>& path, std::size_t expect, bool optional_if_empty) const {
    const Json* j = find(path);
    if (!j) {
      if (optional_if_empty && expect == 0) return {};
      need(path);
    }
    if (!j->is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : *j) {
      if (!v.is_number()) fail(path, "expected an array of numbers");
      out.push_back(v.get<double>());
    }
    if (out.size() != expect)
      fail(path, "has " + std::to_string(out.size()) + " entries, expected " + std::to_string(expect));
    return out;
  }

  static std::optional<std::int64_t> as_integer(const Json& v) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::trunc(d) && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
    }
    return std::nullopt;
  }

  std::vector<std::int64_t> integers(const std::vector<std::string>& path, std::size_t expect) const {
    const Json& j = need(path);
    if (!j.is_array()) fail(path, "expected an array of integers");
    std::vector<std::int64_t> out;
    for (const auto& v : j) {
      auto iv = as_integer(v);
      if (!iv) fail(path, "entry " + std::to_string(out.size()) + " is not an integer");
      out.push_back(*iv);
    }
    if (out.size() != expect)
      fail(path, "has " + std::to_string(out.size()) + " entries, expected " + std::to_string(expect));
    return out;
  }

  template <class T>
  CsrMatrix<T> sparse(const std::string& key, std::size_t rows, std::size_t cols, bool optional_if_empty) const {
    if (!find({key})) {
      if (optional_if_empty && cols == 0) return CsrMatrix<T>(rows, 0);
      need({key});
    }
    if (!need({key}).is_object()) fail({key}, "expected an object with rows, cols, vals, shape");
    const Json& shape = need({key, "shape"});
    if (!shape.is_array() || shape.size() != 2 || !shape[0].is_number_integer() || !shape[1].is_number_integer())
      fail({key, "shape"}, "expected [rows, cols]");
    const auto sr = shape[0].get<std::int64_t>(), sc = shape[1].get<std::int64_t>();
    if (sr != static_cast<std::int64_t>(rows) || sc != static_cast<std::int64_t>(cols))
      fail({key, "shape"}, "is [" + std::to_string(sr) + ", " + std::to_string(sc) + "], expected [" +
                               std::to_string(rows) + ", " + std::to_string(cols) + "]");
    auto index_list = [&](const char* name, std::size_t bound) {
      const Json& a = need({key, name});
      if (!a.is_array()) fail({key, name}, "expected an array of indices");
      std::vector<std::size_t> out;
      for (const auto& v : a) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) fail({key, name}, "indices must be nonnegative integers");
        const auto idx = v.get<std::size_t>();
        if (idx >= bound)
          fail({key, name}, "index " + std::to_string(idx) + " out of range for dimension " + std::to_string(bound));
        out.push_back(idx);
      }
      return out;
    };
    const auto ri = index_list("rows", rows);
    const auto ci = index_list("cols", cols);
    const Json& vals = need({key, "vals"});
    if (!vals.is_array()) fail({key, "vals"}, "expected an array of numbers");
    std::vector<T> v;
    for (const auto& x : vals) {
      if constexpr (std::is_same_v<T, std::int64_t>) {
        auto iv = as_integer(x);
        if (!iv) fail({key, "vals"}, "entry " + std::to_string(v.size()) + " is not an integer; integer coefficients are required");
        v.push_back(*iv);
      } else {
        if (!x.is_number()) fail({key, "vals"}, "expected an array of numbers");
        v.push_back(x.get<double>());
      }
    }
    if (ri.size() != ci.size() || ri.size() != v.size())
      fail({key, "vals"}, "rows, cols and vals have lengths " + std::to_string(ri.size()) + ", " +
                              std::to_string(ci.size()) + ", " + std::to_string(v.size()));
    return CsrMatrix<T>::from_triplets(rows, cols, ri, ci, v);
  }

 private:
  static std::string join(const std::vector<std::string>& path) {
    std::string s;
    for (const auto& k : path) s += (s.empty() ? "" : ".") + k;
    return s;
  }
  std::string_view text_;
  const Json& doc_;
};

}  // namespace detail

/// Problem document: {n, m, a, d, E, F, h, y_lo, y_hi, x_lo, x_hi} with E and
/// F as 0-based triplets {rows, cols, vals, shape}. Keys for the continuous
/// part may be left out when n = 0.
inline MilpInstance parse_problem(std::string_view text) {
  const Json doc = parse_json_text(text);
  if (!doc.is_object()) throw ParseError("problem document must be a JSON object", 1, 1);
  detail::ProblemReader rd(text, doc);
  const std::size_t n = rd.count({"n"}), m = rd.count({"m"});
  const Json& h = rd.need({"h"});
  if (!h.is_array()) rd.fail({"h"}, "expected an array of numbers");
  const std::size_t p = h.size();

  MilpInstance milp;
  milp.a = rd.reals({"a"}, n, true);
  milp.d = rd.reals({"d"}, m, false);
  milp.E = rd.sparse<double>("E", p, n, true);
  milp.F = rd.sparse<std::int64_t>("F", p, m, false);
  milp.h = rd.reals({"h"}, p, false);
  milp.y_lo = rd.integers({"y_lo"}, m);
  milp.y_hi = rd.integers({"y_hi"}, m);
  milp.x_lo = rd.reals({"x_lo"}, n, true);
  milp.x_hi = rd.reals({"x_hi"}, n, true);
  try {
    milp.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("invalid problem: ") + e.what(), 1, 1);
  }
  return milp;
}

inline MilpInstance load_problem(const std::filesystem::path& path) { return parse_problem(read_file(path)); }

/// Non-finite values have no JSON form; they are written as null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json numbers(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

template <class T>
Json sparse_to_json(const CsrMatrix<T>& M) {
  Json rows = Json::array(), cols = Json::array(), vals = Json::array();
  for (std::size_t i = 0; i < M.rows; ++i) {
    const auto c = M.row_cols(i);
    const auto v = M.row_vals(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      rows.push_back(i);
      cols.push_back(c[k]);
      vals.push_back(v[k]);
    }
  }
  return Json{{"rows", rows}, {"cols", cols}, {"vals", vals}, {"shape", {M.rows, M.cols}}};
}

inline Json problem_to_json(const MilpInstance& milp) {
  Json j;
  j["n"] = milp.n();
  j["m"] = milp.m();
  j["a"] = numbers(milp.a);
  j["d"] = numbers(milp.d);
  j["E"] = sparse_to_json(milp.E);
  j["F"] = sparse_to_json(milp.F);
  j["h"] = numbers(milp.h);
  j["y_lo"] = milp.y_lo;
  j["y_hi"] = milp.y_hi;
  j["x_lo"] = numbers(milp.x_lo);
  j["x_hi"] = numbers(milp.x_hi);
  return j;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// Everything needed to rebuild the relaxed problem exactly, plus the derived
/// quantities for readers that only want the report.
inline Json relaxed_to_json(const RelaxedProblem& P, const RelaxOptions& opts) {
  Json j;
  j["problem"] = problem_to_json(P.milp);
  Json o;
  o["xi"] = P.xi;
  o["alpha"] = P.alpha;
  o["delta"] = P.delta;
  o["phi"] = opts.phi ? Json(*opts.phi) : Json(nullptr);
  o["phi_inflation"] = P.phi_inflation;
  o["slater_margin"] = opts.slater.margin;
  o["slater_iters"] = opts.slater.max_iters;
  j["options"] = o;
  Json g;
  g["omega"] = P.gran.omega;
  g["b_floor"] = numbers(P.gran.b_floor);
  g["rho"] = P.gran.rho;
  g["xi_e"] = P.gran.xi_e;
  j["granularity"] = g;
  j["nu"] = numbers(P.nu);
  j["phi"] = P.phi;
  j["phi_source"] = P.phi_fixed ? "fixed" : "tightening bound";
  j["lambda_radius"] = number(P.lambda_radius);
  j["r"] = P.r;
  j["norm_A"] = P.norm_A;
  j["max_row_norm"] = P.max_row_norm;
  j["untightened_margin"] = number(P.untightened_margin);
  j["slater_point"] = numbers(P.slater_point);
  return j;
}

inline RelaxOptions relax_options_from_json(const Json& o) {
  RelaxOptions opts;
  opts.xi = o.at("xi").get<double>();
  opts.alpha = o.at("alpha").get<double>();
  opts.delta = o.at("delta").get<double>();
  if (!o.at("phi").is_null()) opts.phi = o.at("phi").get<double>();
  opts.phi_inflation = o.at("phi_inflation").get<double>();
  opts.slater.margin = o.at("slater_margin").get<double>();
  opts.slater.max_iters = o.at("slater_iters").get<long>();
  return opts;
}

struct LoadedRelaxation {
  RelaxedProblem problem;
  RelaxOptions options;
};

/// Rebuilds the relaxed problem from its document and checks the stored
/// constants against the rebuild.
inline LoadedRelaxation parse_relaxed(std::string_view text) {
  const Json doc = parse_json_text(text);
  LoadedRelaxation out;
  try {
    const MilpInstance milp = parse_problem(doc.at("problem").dump());
    out.options = relax_options_from_json(doc.at("options"));
    out.problem = build_relaxation(milp, out.options);
    const double phi = doc.at("phi").get<double>();
    if (std::abs(phi - out.problem.phi) > 1e-12 * std::max(1.0, std::abs(phi)))
      throw ParseError("stored phi " + std::to_string(phi) + " does not match the rebuilt value " +
                       std::to_string(out.problem.phi));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("relaxed document: ") + e.what());
  }
  return out;
}

inline LoadedRelaxation load_relaxed(const std::filesystem::path& path) { return parse_relaxed(read_file(path)); }

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr std::string_view kTraceHeader = "tick,epoch,dist_primal,dist_dual,cost,rounded_feasible,msgs_sent";

inline std::string trace_to_csv(std::span<const TraceRecord> records) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.tick) + ',' + std::to_string(r.epoch) + ',' + format_real(r.dist_primal) + ',' +
           format_real(r.dist_dual) + ',' + format_real(r.cost) + ',' + (r.rounded_feasible ? '1' : '0') + ',' +
           std::to_string(r.msgs_sent) + '\n';
  }
  return out;
}

/// Strict reader: exact header, seven fields per row, strictly increasing ticks.
inline std::vector<TraceRecord> parse_trace_csv(std::string_view text) {
  std::vector<TraceRecord> out;
  std::size_t line_no = 0, pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (header) {
      if (line != kTraceHeader) throw ParseError("trace header must be \"" + std::string(kTraceHeader) + "\"", line_no, 1);
      header = false;
      continue;
    }
    if (line.empty()) {
      if (pos >= text.size()) break;
      throw ParseError("empty row in trace", line_no, 1);
    }
    std::vector<std::string_view> f;
    std::size_t s = 0;
    while (true) {
      const std::size_t c = line.find(',', s);
      f.push_back(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s));
      if (c == std::string_view::npos) break;
      s = c + 1;
    }
    if (f.size() != 7) throw ParseError("expected 7 fields, found " + std::to_string(f.size()), line_no, 1);
    std::size_t col = 1;
    auto integer = [&](std::string_view v) {
      long x = 0;
      auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (ec != std::errc() || p != v.data() + v.size()) throw ParseError("bad integer \"" + std::string(v) + "\"", line_no, col);
      col += v.size() + 1;
      return x;
    };
    auto real = [&](std::string_view v) {
      const std::string sv(v);
      char* e = nullptr;
      const double x = std::strtod(sv.c_str(), &e);
      if (sv.empty() || e != sv.c_str() + sv.size()) throw ParseError("bad number \"" + sv + "\"", line_no, col);
      col += v.size() + 1;
      return x;
    };
    TraceRecord r;
    r.tick = integer(f[0]);
    r.epoch = integer(f[1]);
    r.dist_primal = real(f[2]);
    r.dist_dual = real(f[3]);
    r.cost = real(f[4]);
    const long flag = integer(f[5]);
    if (flag != 0 && flag != 1) throw ParseError("rounded_feasible must be 0 or 1", line_no, col);
    r.rounded_feasible = flag == 1;
    r.msgs_sent = integer(f[6]);
    if (!out.empty() && r.tick <= out.back().tick) throw ParseError("ticks must increase strictly", line_no, 1);
    if (!(r.dist_primal >= 0.0) || !(r.dist_dual >= 0.0)) throw ParseError("distances must be nonnegative", line_no, 1);
    out.push_back(r);
  }
  if (header) throw ParseError("trace is empty", 1, 1);
  return out;
}

inline std::vector<TraceRecord> load_trace(const std::filesystem::path& path) { return parse_trace_csv(read_file(path)); }

inline Json feasibility_to_json(const FeasibilityReport& rep) {
  Json v = Json::array();
  for (const auto& x : rep.violations) v.push_back(x.describe());
  return Json{{"feasible", rep.feasible}, {"min_margin", number(rep.min_margin())}, {"violations", v}};
}

/// Run metadata the analyzer needs beyond the trace columns.
struct RunSummary {
  std::string mode;
  double gamma = 0.0;
  double beta = 0.0;
  long epoch_gap = 1;
  double lambda0_dist = 0.0;
  std::vector<double> primal_ratios;
  double reference_residual = 0.0;
  long reference_iters = 0;
};

inline Json solution_to_json(const RelaxedProblem& P, const SimTrace& trace, const SaddleSolution& ref,
                             const RunSummary& run) {
  Json j;
  j["mode"] = run.mode;
  j["steps"] = Json{{"gamma", run.gamma}, {"beta", run.beta}};
  j["epoch_gap"] = run.epoch_gap;
  j["z_final"] = numbers(trace.z_final);
  j["lambda_final"] = numbers(trace.lambda_final);
  j["x"] = numbers(trace.rounded.x);
  j["y"] = trace.rounded.y;
  j["cost"] = milp_cost(P.milp, trace.rounded);
  j["certificate"] = feasibility_to_json(trace.certificate);
  j["reference"] = Json{{"z_hat", numbers(ref.z_hat)},
                        {"lambda_hat", numbers(ref.lambda_hat)},
                        {"residual", run.reference_residual},
                        {"iterations", run.reference_iters}};
  j["lambda0_dist"] = run.lambda0_dist;
  j["primal_ratios"] = numbers(run.primal_ratios);
  return j;
}

inline RunSummary run_summary_from_json(const Json& j) {
  RunSummary s;
  try {
    s.mode = j.at("mode").get<std::string>();
    s.gamma = j.at("steps").at("gamma").get<double>();
    s.beta = j.at("steps").at("beta").get<double>();
    s.epoch_gap = j.at("epoch_gap").get<long>();
    s.lambda0_dist = j.at("lambda0_dist").get<double>();
    for (const auto& v : j.at("primal_ratios"))
      s.primal_ratios.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
    s.reference_residual = j.at("reference").at("residual").get<double>();
    s.reference_iters = j.at("reference").at("iterations").get<long>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("solution document: ") + e.what());
  }
  return s;
}

inline Json bounds_to_json(const BoundsReport& b) {
  Json j;
  j["phi"] = b.phi;
  j["lambda_radius"] = number(b.lambda_radius);
  j["reg_gap_bound"] = number(b.reg_gap_bound);
  j["hoffman_sigma"] = b.hoffman_sigma;
  j["provenance"] = Json{{"sigma", b.sigma_source},
                         {"total_bound", b.sigma_source == "user" ? "user sigma" : "estimate-based"}};
  j["milp_lp_gap_bound"] = number(b.milp_lp_gap_bound);
  j["rounding_term"] = b.rounding_term;
  j["total_bound"] = number(b.total_bound);
  j["beta"] = b.beta;
  j["q_d"] = b.q_d;
  j["q_p_hat"] = b.q_p_hat;
  if (b.measured_reg_gap) j["measured_reg_gap"] = *b.measured_reg_gap;
  if (b.measured_tightened_violation) j["max_tightened_violation"] = *b.measured_tightened_violation;
  j["envelopes"] = Json{{"dual_squared", numbers(b.dual_envelope)},
                        {"dual_squared_measured", numbers(b.dual_measured)},
                        {"primal", numbers(b.primal_envelope)},
                        {"primal_measured", numbers(b.primal_measured)}};
  Json v = Json::array();
  for (const auto& x : b.violations)
    v.push_back(Json{{"epoch", x.epoch}, {"which", x.which}, {"measured", x.measured}, {"bound", number(x.bound)}});
  j["violations"] = v;
  return j;
}

// ---------------------------------------------------------------------------
// SVG line charts

struct Series {
  std::string name;
  std::vector<double> y;
  bool log_scale = false;
};

/// One stacked panel per series against a shared x column. Every series is
/// tagged with data-column so callers can check nothing was dropped.
inline std::string line_chart_svg(const std::string& title, const std::string& x_name, std::span<const double> x,
                                  const std::vector<Series>& series) {
  const double W = 720, panel_h = 150, left = 80, right = 20, top = 40, gap = 40;
  const double H = top + static_cast<double>(series.size()) * (panel_h + gap);
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_real(W) + "\" height=\"" + format_real(H) +
       "\" data-x-column=\"" + x_name + "\">\n";
  s += "<text x=\"" + format_real(left) + "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";
  double xmin = 0.0, xmax = 1.0;
  if (!x.empty()) {
    xmin = *std::min_element(x.begin(), x.end());
    xmax = *std::max_element(x.begin(), x.end());
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& ser = series[k];
    const double y0 = top + static_cast<double>(k) * (panel_h + gap);
    auto tr = [&](double v) {
      if (!ser.log_scale) return v;
      return std::log10(std::max(v, 1e-300));
    };
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : ser.y) {
      if (!std::isfinite(v) || (ser.log_scale && v <= 0.0)) continue;
      lo = std::min(lo, tr(v));
      hi = std::max(hi, tr(v));
    }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi <= lo) hi = lo + 1.0;
    s += "<g data-column=\"" + ser.name + "\">\n";
    s += "<rect x=\"" + format_real(left) + "\" y=\"" + format_real(y0) + "\" width=\"" + format_real(W - left - right) +
         "\" height=\"" + format_real(panel_h) + "\" fill=\"none\" stroke=\"#888\"/>\n";
    const std::string label = ser.name + (ser.log_scale ? " (log10)" : "") + " vs " + x_name;
    s += "<text x=\"" + format_real(left) + "\" y=\"" + format_real(y0 - 6) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + label + "</text>\n";
    s += "<text x=\"" + format_real(left - 6) + "\" y=\"" + format_real(y0 + 10) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
         format_real(ser.log_scale ? std::pow(10.0, hi) : hi) + "</text>\n";
    s += "<text x=\"" + format_real(left - 6) + "\" y=\"" + format_real(y0 + panel_h) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
         format_real(ser.log_scale ? std::pow(10.0, lo) : lo) + "</text>\n";
    std::string pts;
    for (std::size_t i = 0; i < ser.y.size() && i < x.size(); ++i) {
      double v = ser.y[i];
      if (!std::isfinite(v)) continue;
      v = ser.log_scale && v <= 0.0 ? lo : std::clamp(tr(v), lo, hi);
      const double px = left + (x[i] - xmin) / (xmax - xmin) * (W - left - right);
      const double py = y0 + panel_h - (v - lo) / (hi - lo) * panel_h;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
      pts += buf;
    }
    if (!pts.empty()) pts.pop_back();
    s += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
    s += "</g>\n";
  }
  s += "</svg>\n";
  return s;
}

/// Chart of every trace column against tick; distances on a log axis.
inline std::string trace_svg(const std::string& title, std::span<const TraceRecord> records) {
  std::vector<double> tick;
  std::vector<Series> ser{{"epoch", {}, false},           {"dist_primal", {}, true}, {"dist_dual", {}, true},
                          {"cost", {}, false},            {"rounded_feasible", {}, false},
                          {"msgs_sent", {}, false}};
  for (const auto& r : records) {
    tick.push_back(static_cast<double>(r.tick));
    ser[0].y.push_back(static_cast<double>(r.epoch));
    ser[1].y.push_back(r.dist_primal);
    ser[2].y.push_back(r.dist_dual);
    ser[3].y.push_back(r.cost);
    ser[4].y.push_back(r.rounded_feasible ? 1.0 : 0.0);
    ser[5].y.push_back(static_cast<double>(r.msgs_sent));
  }
  return line_chart_svg(title, "tick", tick, ser);
}

}  // namespace granmilp::io

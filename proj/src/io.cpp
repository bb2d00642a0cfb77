#include "fracflow/io.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include <fmt/format.h>

#include "fracflow/errors.hpp"

namespace fracflow {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols{"step",  "clock", "dt",      "min_v",   "max_v",
                                             "harnack_ratio",  "volume",  "J",       "S_func",
                                             "F",     "H",     "r_sigma", "lambda_fit", "fit_residual"};
  return cols;
}

namespace {

std::string cell(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto& cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const Snapshot& s : traj.snapshots) {
    const DiagRecord& d = s.diag;
    os << s.step << ',' << format_double(s.clock) << ',' << format_double(s.dt) << ',' << format_double(s.field.min())
       << ',' << format_double(s.field.max()) << ',' << format_double(d.harnack_ratio) << ','
       << format_double(d.volume) << ',' << cell(d.J) << ',' << format_double(d.S_func) << ',' << cell(d.F) << ','
       << cell(d.H) << ',' << format_double(d.r_sigma) << ',' << cell(d.lambda_fit) << ',' << cell(d.fit_residual)
       << '\n';
  }
}

void write_residual_csv(std::ostream& os, const std::vector<ResidualSample>& history) {
  os << "s,sup_residual,lambda_fit\n";
  for (const auto& r : history) {
    os << format_double(r.s) << ',' << format_double(r.sup_residual) << ',' << format_double(r.lambda_fit) << '\n';
  }
}

namespace {

void dump(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += Json(key).dump();
        out += ": ";
        dump(value, out, depth + 1);
      }
      out += '\n' + close + '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], out, depth + 1);
      }
      out += '\n' + close + ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, out, 0);
  out += '\n';
  return out;
}

Json to_json(const SphereParams& p) { return Json{{"n", p.n()}, {"sigma", p.sigma()}}; }

Json to_json(const ConstantSet& c) {
  return Json{{"m", c.m},
              {"N", c.bigN},
              {"psigma1", c.psigma1},
              {"c_pos", c.c_pos},
              {"c_neg", c.c_neg},
              {"vol_sn", c.vol_sn},
              {"sobolev_s", c.sobolev_s},
              {"c_steady", c.c_steady},
              {"k_profile", c.k_profile},
              {"k_profile_printed", c.k_profile_printed},
              {"kappa2", c.kappa2},
              {"inv_one_minus_m", c.inv_one_minus_m}};
}

Json to_json(const SolverConfig& c) {
  return Json{{"dt_init", c.dt_init},
              {"safety", c.safety},
              {"positivity_floor", c.positivity_floor},
              {"max_steps", c.max_steps},
              {"stop_residual", c.stop_residual},
              {"record_every", c.record_every},
              {"max_clock", c.max_clock},
              {"extinction_tol", c.extinction_tol}};
}

namespace {

Json opt(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

}  // namespace

Json to_json(const DeficitReport& r) {
  return Json{{"sobolev_deficit", r.sobolev_deficit},
              {"hls_deficit", r.hls_deficit},
              {"remainder_lhs", opt(r.remainder_lhs)},
              {"remainder_rhs_bound", opt(r.remainder_rhs_bound)},
              {"remainder_ok", r.remainder_ok ? Json(*r.remainder_ok) : Json(nullptr)},
              {"remainder_constant", r.remainder_constant}};
}

Json to_json(const ExtinctionReport& r) {
  Json history = Json::array();
  for (const auto& h : r.residual_history) history.push_back(Json{{"s", h.s}, {"sup_residual", h.sup_residual}});
  return Json{{"T_hat", r.T_hat},
              {"T_upper", r.T_upper},
              {"T_lower", opt(r.T_lower)},
              {"F0", r.F0},
              {"sandwich_ok", r.sandwich_ok},
              {"lambda_limit", r.lambda_limit},
              {"amplitude_limit", r.amplitude_limit},
              {"k_measured", r.k_measured},
              {"k_derived", r.k_derived},
              {"k_printed", r.k_printed},
              {"k_measured_over_derived", r.k_measured / r.k_derived},
              {"k_measured_over_printed", r.k_measured / r.k_printed},
              {"residual_history", history}};
}

Json to_json(const BubbleFit& f) {
  return Json{{"lambda_hat", f.lambda_hat},
              {"amplitude", f.amplitude},
              {"residual_sup", f.residual_sup},
              {"residual_l2", f.residual_l2},
              {"at_boundary", f.at_boundary}};
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace fracflow

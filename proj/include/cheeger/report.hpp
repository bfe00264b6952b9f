#ifndef CHEEGER_REPORT_HPP
#define CHEEGER_REPORT_HPP

#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cheeger/alm.hpp"
#include "cheeger/certify.hpp"

namespace cheeger {

enum class Relaxation { Basic, Dnnp, Dnnpfrc };

inline const char* to_string(Relaxation r) {
  switch (r) {
    case Relaxation::Basic: return "basic";
    case Relaxation::Dnnp: return "dnnp";
    case Relaxation::Dnnpfrc: return "dnnpfrc";
  }
  return "unknown";
}

/// Relative gap (ub - lb) / ub. A lower bound above the upper bound gives a
/// negative gap, returned unchanged with a note on `warnings`.
inline double gap(double ub, double lb, std::ostream* warnings = nullptr) {
  if (!(ub > 0.0)) throw std::invalid_argument("upper bound must be positive to form a gap");
  const double g = (ub - lb) / ub;
  if (g < 0.0 && warnings) *warnings << "warning: lower bound " << lb << " exceeds upper bound " << ub << "\n";
  return g;
}

struct RelaxationResult {
  double bound = 0.0;  // certified
  double seconds = 0.0;
  int cuts = 0;
  int iterations = 0;
  Certificate certificate;
  std::vector<IterationLog> log;
};

struct BoundReport {
  std::string instance;
  int n = 0;
  int m = 0;
  std::optional<double> ub;
  std::optional<RelaxationResult> basic;
  std::optional<RelaxationResult> dnnp;
  std::optional<RelaxationResult> dnnpfrc;

  std::optional<RelaxationResult>& slot(Relaxation r) {
    switch (r) {
      case Relaxation::Basic: return basic;
      case Relaxation::Dnnp: return dnnp;
      case Relaxation::Dnnpfrc: return dnnpfrc;
    }
    throw std::invalid_argument("unknown relaxation");
  }
  const std::optional<RelaxationResult>& slot(Relaxation r) const { return const_cast<BoundReport*>(this)->slot(r); }

  std::optional<double> gap_of(Relaxation r) const {
    const auto& s = slot(r);
    if (!s || !ub || !(*ub > 0.0)) return std::nullopt;
    return gap(*ub, s->bound);
  }
};

inline constexpr const char* kCsvHeader = "instance,n,m,UB,bound,gap,time,cuts,iterations";

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// One CSV row for the chosen relaxation. Bounds are shown with two
/// decimals; the JSON report keeps full precision.
inline std::string csv_row(const BoundReport& rep, Relaxation r) {
  const auto& s = rep.slot(r);
  if (!s) throw std::invalid_argument(std::string("no result for relaxation ") + to_string(r));
  std::ostringstream out;
  out << detail::csv_field(rep.instance) << ',' << rep.n << ',' << rep.m << ',';
  if (rep.ub) out << detail::fixed(*rep.ub, 2);
  out << ',' << detail::fixed(s->bound, 2) << ',';
  if (auto g = rep.gap_of(r)) out << detail::fixed(*g, 4);
  out << ',' << detail::fixed(s->seconds, 3) << ',' << s->cuts << ',' << s->iterations;
  return out.str();
}

inline nlohmann::json to_json(const Certificate& c) {
  return {{"dual_objective", c.dual_objective},
          {"correction", c.correction},
          {"certified_lb", c.certified_lb},
          {"r_bar", c.r_bar},
          {"lambda_min", c.lambda_min}};
}

inline nlohmann::json to_json(const IterationLog& e) {
  return {{"iter", e.iter},
          {"alpha", e.alpha},
          {"F", e.F},
          {"inner_iters", e.inner_iters},
          {"cuts_added", e.cuts_added},
          {"cuts_removed", e.cuts_removed},
          {"correction", e.correction}};
}

inline nlohmann::json to_json(const BoundReport& rep) {
  nlohmann::json j;
  j["instance"] = rep.instance;
  j["n"] = rep.n;
  j["m"] = rep.m;
  j["UB"] = rep.ub ? nlohmann::json(*rep.ub) : nlohmann::json(nullptr);
  for (auto r : {Relaxation::Basic, Relaxation::Dnnp, Relaxation::Dnnpfrc}) {
    const auto& s = rep.slot(r);
    if (!s) continue;
    const auto g = rep.gap_of(r);
    j["bounds"][to_string(r)] = {{"bound", s->bound},
                                 {"gap", g ? nlohmann::json(*g) : nlohmann::json(nullptr)},
                                 {"time", s->seconds},
                                 {"cuts", s->cuts},
                                 {"iterations", s->iterations},
                                 {"certificate", to_json(s->certificate)}};
  }
  return j;
}

/// Iteration log as JSON lines.
inline std::string log_jsonl(const std::vector<IterationLog>& log) {
  std::string out;
  for (const auto& e : log) out += to_json(e).dump() + "\n";
  return out;
}

}  // namespace cheeger

#endif  // CHEEGER_REPORT_HPP

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "musyn/dk/trace.hpp"
#include "musyn/util/matrix_json.hpp"

namespace musyn::dk {

namespace detail {
inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}
}  // namespace detail

/// CSV schema: k_update_index, phase, gamma_est, mu_bar_exact, d1..dm.
inline void write_trace_csv(std::ostream& out, const SynthesisTrace& trace) {
  const Eigen::Index m = trace.records.empty() ? 0 : trace.records.front().d.size();
  out << "k_update_index,phase,gamma_est,mu_bar_exact";
  for (Eigen::Index i = 0; i < m; ++i) out << ",d" << (i + 1);
  out << "\n";
  for (const auto& r : trace.records) {
    out << r.k_update_index << "," << phase_name(r.phase) << "," << detail::fmt(r.gamma_est)
        << "," << detail::fmt(r.mu_bar_exact);
    for (Eigen::Index i = 0; i < r.d.size(); ++i) out << "," << detail::fmt(r.d[i]);
    out << "\n";
  }
}

inline void write_trace_csv(const std::string& path, const SynthesisTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error("trace: cannot write '" + path + "'");
  write_trace_csv(out, trace);
}

inline nlohmann::json trace_to_json(const SynthesisTrace& trace) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : trace.records) {
    nlohmann::json j;
    j["k_update_index"] = r.k_update_index;
    j["phase"] = phase_name(r.phase);
    j["gamma_est"] = r.gamma_est;
    if (std::isfinite(r.mu_bar_exact))
      j["mu_bar_exact"] = r.mu_bar_exact;
    else
      j["mu_bar_exact"] = nullptr;
    nlohmann::json dv = nlohmann::json::array();
    for (Eigen::Index i = 0; i < r.d.size(); ++i) dv.push_back(r.d[i]);
    j["d"] = dv;
    j["K"] = matrix_to_json(r.K);
    arr.push_back(j);
  }
  return nlohmann::json{{"records", arr}};
}

inline void write_trace_json(const std::string& path, const SynthesisTrace& trace) {
  std::ofstream out(path);
  if (!out) throw Error("trace: cannot write '" + path + "'");
  out << trace_to_json(trace).dump(1) << "\n";
}

/// Line plot of the achieved upper bound against the K-update count, with
/// grey markers at D-step completions. Falls back to gamma_est when no
/// exact values were recorded. Emitted directly, no plotting dependency.
inline void write_mu_svg(std::ostream& out, const SynthesisTrace& trace,
                         std::optional<double> model_based_mu = std::nullopt,
                         std::optional<double> nominal_hinf = std::nullopt) {
  const double W = 880, Hh = 520;
  const double ml = 72, mr = 24, mt = 28, mb = 52;
  auto value_of = [](const TraceRecord& r) {
    return std::isfinite(r.mu_bar_exact) ? r.mu_bar_exact : r.gamma_est;
  };

  double lo = 1e300, hi = -1e300;
  int xmax = 1;
  for (const auto& r : trace.records) {
    const double v = value_of(r);
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    xmax = std::max(xmax, r.k_update_index + 1);
  }
  if (model_based_mu) lo = std::min(lo, *model_based_mu), hi = std::max(hi, *model_based_mu);
  if (nominal_hinf) lo = std::min(lo, *nominal_hinf), hi = std::max(hi, *nominal_hinf);
  if (!(lo < hi)) lo = 0.0, hi = std::max(1.0, hi);
  const double pad = 0.06 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto X = [&](double k) { return ml + (W - ml - mr) * k / xmax; };
  auto Y = [&](double v) { return mt + (Hh - mt - mb) * (hi - v) / (hi - lo); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh
      << "\" viewBox=\"0 0 " << W << " " << Hh << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes and ticks
  out << "<g stroke=\"black\" fill=\"none\"><path d=\"M" << ml << " " << mt << " V" << Hh - mb
      << " H" << W - mr << "\"/></g>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = lo + (hi - lo) * t / 5.0;
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << Y(v) << "\" x2=\"" << ml << "\" y2=\""
        << Y(v) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << Y(v) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << std::setprecision(4) << v
        << "</text>\n";
    const int k = static_cast<int>(std::lround(xmax * t / 5.0));
    out << "<line x1=\"" << X(k) << "\" y1=\"" << Hh - mb << "\" x2=\"" << X(k) << "\" y2=\""
        << Hh - mb + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << X(k) << "\" y=\"" << Hh - mb + 18
        << "\" font-size=\"12\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << Hh - 14
      << "\" font-size=\"13\" text-anchor=\"middle\">K updates</text>\n";
  out << "<text x=\"18\" y=\"" << (mt + Hh - mb) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << (mt + Hh - mb) / 2 << ")\">achieved upper bound</text>\n";

  // D-step markers
  for (const auto& r : trace.records)
    if (r.phase == Phase::d_step)
      out << "<line x1=\"" << X(r.k_update_index) << "\" y1=\"" << mt << "\" x2=\""
          << X(r.k_update_index) << "\" y2=\"" << Hh - mb
          << "\" stroke=\"grey\" stroke-dasharray=\"3,3\"/>\n";

  // reference levels
  if (nominal_hinf)
    out << "<line x1=\"" << ml << "\" y1=\"" << Y(*nominal_hinf) << "\" x2=\"" << W - mr
        << "\" y2=\"" << Y(*nominal_hinf)
        << "\" stroke=\"#888800\" stroke-dasharray=\"7,4\"/><text x=\"" << W - mr - 4
        << "\" y=\"" << Y(*nominal_hinf) - 5
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#888800\">nominal "
           "H-infinity</text>\n";
  if (model_based_mu)
    out << "<line x1=\"" << ml << "\" y1=\"" << Y(*model_based_mu) << "\" x2=\"" << W - mr
        << "\" y2=\"" << Y(*model_based_mu)
        << "\" stroke=\"#bb0000\" stroke-dasharray=\"7,4\"/><text x=\"" << W - mr - 4
        << "\" y=\"" << Y(*model_based_mu) - 5
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#bb0000\">model-based "
           "DK</text>\n";

  // piecewise-constant trajectory
  out << "<path fill=\"none\" stroke=\"#0044cc\" stroke-width=\"1.6\" d=\"";
  bool first = true;
  double prev_v = 0.0;
  for (const auto& r : trace.records) {
    const double v = value_of(r);
    if (!std::isfinite(v)) continue;
    if (first) {
      out << "M" << X(r.k_update_index) << " " << Y(v);
      first = false;
    } else {
      out << " H" << X(r.k_update_index);
      if (v != prev_v) out << " V" << Y(v);
    }
    prev_v = v;
  }
  out << "\"/>\n</svg>\n";
}

inline void write_mu_svg(const std::string& path, const SynthesisTrace& trace,
                         std::optional<double> model_based_mu = std::nullopt,
                         std::optional<double> nominal_hinf = std::nullopt) {
  std::ofstream out(path);
  if (!out) throw Error("trace: cannot write '" + path + "'");
  write_mu_svg(out, trace, model_based_mu, nominal_hinf);
}

}  // namespace musyn::dk

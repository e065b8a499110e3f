#include "ddc/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "ddc/errors.hpp"

namespace ddc::experiment {

namespace {

void append_optional(std::string& out, const std::optional<double>& v) {
  out += ',';
  if (v) out += format_double(*v);
}

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr double kFloor = 1e-16;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                "#bcbd22", "#17becf"};

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trajectory_csv(const std::vector<AgentRecord>& records) {
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (const AgentRecord& r : records) {
    out += format_double(r.t);
    out += ',';
    out += std::to_string(r.agent);
    append_optional(out, r.rel_error);
    append_optional(out, r.disagreement);
    append_optional(out, r.residual);
    append_optional(out, r.lyap_v);
    append_optional(out, r.lyap_bound);
    out += '\n';
  }
  return out;
}

std::string plot_svg(const std::vector<AgentRecord>& records,
                     std::size_t agents, const std::string& title,
                     bool use_residual) {
  auto value = [&](const AgentRecord& r) {
    return use_residual ? r.residual : r.rel_error;
  };
  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -t_min;
  double e_min = t_min;
  double e_max = -t_min;
  for (const AgentRecord& r : records) {
    const auto v = value(r);
    if (!v || !std::isfinite(*v)) continue;
    const double e = std::log10(std::max(*v, kFloor));
    t_min = std::min(t_min, r.t);
    t_max = std::max(t_max, r.t);
    e_min = std::min(e_min, e);
    e_max = std::max(e_max, e);
  }
  const bool empty = !(t_min <= t_max);
  if (empty) {
    t_min = 0.0;
    t_max = 1.0;
    e_min = -1.0;
    e_max = 0.0;
  }
  if (t_max == t_min) t_max = t_min + 1.0;
  e_min = std::floor(e_min);
  e_max = std::ceil(e_max);
  if (e_max == e_min) e_max = e_min + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double t) { return kLeft + pw * (t - t_min) / (t_max - t_min); };
  auto sy = [&](double e) { return kTop + ph * (e_max - e) / (e_max - e_min); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
     << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << escape_xml(title) << "</text>\n";

  // Decade grid lines, at most ~10 labels.
  const int decades = static_cast<int>(e_max - e_min);
  const int stride = std::max(1, decades / 10);
  for (int k = static_cast<int>(e_min); k <= static_cast<int>(e_max);
       k += stride) {
    const double y = sy(k);
    os << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(y) << "\" x2=\""
       << fixed(kLeft + pw) << "\" y2=\"" << fixed(y)
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(y + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">1e"
       << k << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double t = t_min + (t_max - t_min) * k / 5.0;
    os << "<text x=\"" << fixed(sx(t)) << "\" y=\"" << fixed(kTop + ph + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << format_double(std::round(t * 1e6) / 1e6) << "</text>\n";
  }
  os << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop)
     << "\" width=\"" << fixed(pw) << "\" height=\"" << fixed(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\""
     << fixed(kHeight - 10)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">t</text>\n";
  os << "<text transform=\"translate(18," << fixed(kTop + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">"
     << (use_residual ? "residual (log scale)" : "relative error (log scale)")
     << "</text>\n";

  for (std::size_t a = 0; a < agents; ++a) {
    std::string points;
    for (const AgentRecord& r : records) {
      if (r.agent != a) continue;
      const auto v = value(r);
      if (!v || !std::isfinite(*v)) continue;
      if (!points.empty()) points += ' ';
      points += fixed(sx(r.t));
      points += ',';
      points += fixed(sy(std::log10(std::max(*v, kFloor))));
    }
    if (points.empty()) continue;
    os << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\""
       << kPalette[a % std::size(kPalette)] << "\" points=\"" << points
       << "\"><title>agent " << a << "</title></polyline>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& dir, const std::string& name,
                const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ValidationError("cannot create output directory '" + dir.string() +
                          "': " + ec.message());
  }
  const std::filesystem::path path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
}

}  // namespace ddc::experiment

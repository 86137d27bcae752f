#include "impc/report.hpp"

#include "impc/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace impc::report {

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw InvalidArgument("CsvWriter: row has the wrong number of fields");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) text_ += ',';
    const auto& c = cells[i];
    if (c.find_first_of(",\"\r\n") != std::string::npos) {
      text_ += '"';
      for (char ch : c) {
        if (ch == '"') text_ += '"';
        text_ += ch;
      }
      text_ += '"';
    } else {
      text_ += c;
    }
  }
  text_ += "\r\n";
  return *this;
}

void CsvWriter::save(const std::filesystem::path& path) const { write_text(path, text_); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
}

std::string run_csv(const harness::RunRecord& run) {
  const Index n = run.final_state.size();
  const Index m = run.steps.empty() ? 0 : run.steps.front().u.size();
  std::vector<std::string> header{"k"};
  for (Index i = 0; i < n; ++i) header.push_back("x_" + std::to_string(i + 1));
  for (Index i = 0; i < m; ++i) header.push_back("u_" + std::to_string(i + 1));
  header.insert(header.end(), {"n_star", "j_star", "in_terminal"});
  CsvWriter csv(header);
  for (const auto& s : run.steps) {
    std::vector<std::string> r{std::to_string(s.k)};
    for (Index i = 0; i < n; ++i) r.push_back(fmt(s.x(i)));
    for (Index i = 0; i < m; ++i) r.push_back(fmt(s.u(i)));
    r.insert(r.end(), {std::to_string(s.n_star), fmt(s.j_star), s.in_terminal ? "1" : "0"});
    csv.row(r);
  }
  if (!run.infeasible) {
    std::vector<std::string> r{std::to_string(run.steps.size())};
    for (Index i = 0; i < n; ++i) r.push_back(fmt(run.final_state(i)));
    for (Index i = 0; i < m; ++i) r.push_back("");
    r.insert(r.end(), {"", "", ""});
    csv.row(r);
  }
  return csv.str();
}

std::string fd_statistics_csv(const harness::FdStatistics& stats) {
  CsvWriter csv({"dataset_id", "area", "empty"});
  for (std::size_t i = 0; i < stats.areas.size(); ++i)
    csv.row({std::to_string(i), fmt(stats.areas[i]), stats.empty[i] ? "1" : "0"});
  csv.row({"mean", fmt(stats.mean), std::to_string(stats.empty_count)});
  csv.row({"std", fmt(stats.stddev), ""});
  return csv.str();
}

std::string fd_map_csv(const harness::FeasibleDomain& fd) {
  const Index n = fd.points.empty() ? 0 : fd.points.front().size();
  std::vector<std::string> header;
  for (Index i = 0; i < n; ++i) header.push_back("x_" + std::to_string(i + 1));
  header.push_back("feasible");
  CsvWriter csv(header);
  for (std::size_t k = 0; k < fd.points.size(); ++k) {
    std::vector<std::string> r;
    for (Index i = 0; i < n; ++i) r.push_back(fmt(fd.points[k](i)));
    r.push_back(fd.feasible[k] ? "1" : "0");
    csv.row(r);
  }
  return csv.str();
}

namespace {

// Maps data coordinates into a panel of the SVG canvas.
struct Panel {
  double x0, y0, w, h;  // pixel frame
  double lo_x, hi_x, lo_y, hi_y;
  double px(double x) const { return x0 + (x - lo_x) / (hi_x - lo_x) * w; }
  double py(double y) const { return y0 + h - (y - lo_y) / (hi_y - lo_y) * h; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void frame(std::ostringstream& s, const Panel& p, const std::string& title, const std::string& xlabel,
           const std::string& ylabel) {
  s << "<rect x='" << num(p.x0) << "' y='" << num(p.y0) << "' width='" << num(p.w) << "' height='" << num(p.h)
    << "' fill='none' stroke='#444'/>\n";
  s << "<text x='" << num(p.x0 + p.w / 2) << "' y='" << num(p.y0 - 8) << "' text-anchor='middle'>" << title
    << "</text>\n";
  s << "<text x='" << num(p.x0 + p.w / 2) << "' y='" << num(p.y0 + p.h + 30) << "' text-anchor='middle'>" << xlabel
    << "</text>\n";
  s << "<text x='" << num(p.x0 - 40) << "' y='" << num(p.y0 + p.h / 2) << "' text-anchor='middle' transform='rotate(-90 "
    << num(p.x0 - 40) << ' ' << num(p.y0 + p.h / 2) << ")'>" << ylabel << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = p.lo_x + (p.hi_x - p.lo_x) * t / 4.0;
    const double fy = p.lo_y + (p.hi_y - p.lo_y) * t / 4.0;
    s << "<text x='" << num(p.px(fx)) << "' y='" << num(p.y0 + p.h + 14) << "' text-anchor='middle' font-size='10'>"
      << num(fx) << "</text>\n";
    s << "<text x='" << num(p.x0 - 4) << "' y='" << num(p.py(fy) + 3) << "' text-anchor='end' font-size='10'>"
      << num(fy) << "</text>\n";
  }
}

void polyline(std::ostringstream& s, const Panel& p, const std::vector<std::pair<double, double>>& pts,
              const std::string& style, bool closed = false) {
  s << (closed ? "<polygon" : "<polyline") << " points='";
  for (const auto& [x, y] : pts) s << num(p.px(x)) << ',' << num(p.py(y)) << ' ';
  s << "' " << style << "/>\n";
}

void hline(std::ostringstream& s, const Panel& p, double y, const std::string& color) {
  polyline(s, p, {{p.lo_x, y}, {p.hi_x, y}}, "fill='none' stroke='" + color + "' stroke-dasharray='6 3'");
}

std::vector<std::pair<double, double>> box_corners(const setalg::Box& b) {
  const double cx = b.center(0), cy = b.center(1), rx = b.radius(0), ry = b.radius(1);
  return {{cx - rx, cy - ry}, {cx + rx, cy - ry}, {cx + rx, cy + ry}, {cx - rx, cy + ry}};
}

std::vector<std::pair<double, double>> as_pairs(const std::vector<Vector>& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : v) out.emplace_back(p(0), p(1));
  return out;
}

const char* kHeader =
    "<svg xmlns='http://www.w3.org/2000/svg' width='900' height='%d' font-family='sans-serif' font-size='12'>\n"
    "<rect width='100%%' height='100%%' fill='white'/>\n";

std::string header(int height) {
  char buf[256];
  std::snprintf(buf, sizeof buf, kHeader, height);
  return buf;
}

}  // namespace

std::string trajectories_svg(const std::vector<harness::RunRecord>& runs, const Polytope& state_set,
                             const Polytope& input_set, const setalg::Box& x_infinity,
                             const Polytope& terminal_set) {
  std::ostringstream s;
  s << header(1000);
  if (state_set.dim() != 2 || input_set.dim() != 1) {
    s << "<text x='20' y='40'>plots require n = 2 and m = 1</text>\n</svg>\n";
    return s.str();
  }
  const setalg::Box xb = state_set.bounding_box();
  const setalg::Box ub = input_set.bounding_box();
  int horizon = 1;
  for (const auto& r : runs) horizon = std::max(horizon, static_cast<int>(r.steps.size()));

  const Panel plane{90, 40, 760, 300, xb.center(0) - 1.05 * xb.radius(0), xb.center(0) + 1.05 * xb.radius(0),
                    xb.center(1) - 1.1 * xb.radius(1), xb.center(1) + 1.1 * xb.radius(1)};
  frame(s, plane, "State plane", "x_1", "x_2");
  polyline(s, plane, box_corners(xb), "fill='none' stroke='green' stroke-width='2'", true);
  if (!terminal_set.is_empty()) {
    const auto verts = terminal_set.vertices_2d();
    polyline(s, plane, as_pairs(verts), "fill='#3366cc22' stroke='#3366cc'", true);
  }
  polyline(s, plane, box_corners(x_infinity), "fill='#ff000033' stroke='red'", true);
  for (const auto& r : runs) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& st : r.steps) pts.emplace_back(st.x(0), st.x(1));
    if (!r.infeasible) pts.emplace_back(r.final_state(0), r.final_state(1));
    polyline(s, plane, pts, "fill='none' stroke='#222' stroke-opacity='0.35'");
  }

  for (int i = 0; i < 2; ++i) {
    const Panel ts{90, 400.0 + i * 200, 760, 140, 0.0, static_cast<double>(horizon),
                   xb.center(i) - 1.1 * xb.radius(i), xb.center(i) + 1.1 * xb.radius(i)};
    frame(s, ts, "x_" + std::to_string(i + 1) + "(k)", "", "");
    hline(s, ts, xb.center(i) - xb.radius(i), "green");
    hline(s, ts, xb.center(i) + xb.radius(i), "green");
    for (const auto& r : runs) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& st : r.steps) pts.emplace_back(st.k, st.x(i));
      if (!r.infeasible) pts.emplace_back(static_cast<double>(r.steps.size()), r.final_state(i));
      polyline(s, ts, pts, "fill='none' stroke='#222' stroke-opacity='0.35'");
    }
  }
  const Panel us{90, 800, 760, 140, 0.0, static_cast<double>(horizon), ub.center(0) - 1.2 * ub.radius(0),
                 ub.center(0) + 1.2 * ub.radius(0)};
  frame(s, us, "u(k)", "k", "");
  hline(s, us, ub.center(0) - ub.radius(0), "green");
  hline(s, us, ub.center(0) + ub.radius(0), "green");
  for (const auto& r : runs) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& st : r.steps) pts.emplace_back(st.k, st.u(0));
    polyline(s, us, pts, "fill='none' stroke='#222' stroke-opacity='0.35'");
  }
  s << "</svg>\n";
  return s.str();
}

std::string feasible_domain_svg(const std::vector<harness::FeasibleDomain>& domains, const Polytope& state_set) {
  std::ostringstream s;
  s << header(460);
  if (state_set.dim() != 2) {
    s << "<text x='20' y='40'>plots require n = 2</text>\n</svg>\n";
    return s.str();
  }
  const setalg::Box xb = state_set.bounding_box();
  const Panel p{90, 40, 760, 360, xb.center(0) - 1.05 * xb.radius(0), xb.center(0) + 1.05 * xb.radius(0),
                xb.center(1) - 1.1 * xb.radius(1), xb.center(1) + 1.1 * xb.radius(1)};
  frame(s, p, "Feasible domains", "x_1", "x_2");
  polyline(s, p, box_corners(xb), "fill='none' stroke='green' stroke-width='2'", true);
  for (const auto& fd : domains)
    if (fd.hull.size() >= 3) polyline(s, p, as_pairs(fd.hull), "fill='#3366cc10' stroke='#3366cc' stroke-opacity='0.5'", true);
  if (!domains.empty()) {
    const auto& fd = domains.front();
    for (std::size_t k = 0; k < fd.points.size(); ++k)
      s << "<circle cx='" << num(p.px(fd.points[k](0))) << "' cy='" << num(p.py(fd.points[k](1))) << "' r='2' fill='"
        << (fd.feasible[k] ? "#3366cc" : "#bbbbbb") << "'/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace impc::report

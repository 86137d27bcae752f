#include "impc/errors.hpp"
#include "impc/ident.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace impc::ident {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r' && ch != '"') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  std::size_t pos = 0;
  try {
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidArgument("dataset CSV line " + std::to_string(line_no) + ": cannot parse '" + s + "' as a number");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Dataset read_dataset_csv(const std::filesystem::path& path, const Vector& w_bar) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open dataset file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("dataset file " + path.string() + " is empty");
  const auto header = split_csv_line(line);
  if (header.empty() || header.front() != "k") throw InvalidArgument("dataset CSV must start with column 'k'");
  Index n = 0;
  Index m = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& h = header[c];
    if (h.rfind("x_", 0) == 0) {
      if (m > 0) throw InvalidArgument("dataset CSV: state columns must precede input columns");
      ++n;
    } else if (h.rfind("u_", 0) == 0) {
      ++m;
    } else {
      throw InvalidArgument("dataset CSV: unexpected column '" + h + "'");
    }
  }
  Dataset d;
  d.w_bar = w_bar;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw InvalidArgument("dataset CSV line " + std::to_string(line_no) + ": wrong number of fields");
    const double k = parse_double(cells[0], line_no);
    if (k != static_cast<double>(d.states.size()))
      throw InvalidArgument("dataset CSV line " + std::to_string(line_no) + ": k is not consecutive");
    Vector x(n);
    for (Index i = 0; i < n; ++i) x(i) = parse_double(cells[static_cast<std::size_t>(1 + i)], line_no);
    d.states.push_back(std::move(x));
    bool empty_inputs = true;
    for (Index i = 0; i < m; ++i)
      if (!cells[static_cast<std::size_t>(1 + n + i)].empty()) empty_inputs = false;
    if (!empty_inputs) {
      Vector u(m);
      for (Index i = 0; i < m; ++i) u(i) = parse_double(cells[static_cast<std::size_t>(1 + n + i)], line_no);
      d.inputs.push_back(std::move(u));
    }
  }
  d.validate();
  return d;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& d) {
  d.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write dataset file " + path.string());
  out << "k";
  for (Index i = 0; i < d.state_dim(); ++i) out << ",x_" << (i + 1);
  for (Index i = 0; i < d.input_dim(); ++i) out << ",u_" << (i + 1);
  out << "\r\n";
  for (std::size_t k = 0; k < d.states.size(); ++k) {
    out << k;
    for (Index i = 0; i < d.state_dim(); ++i) out << ',' << fmt(d.states[k](i));
    for (Index i = 0; i < d.input_dim(); ++i) {
      out << ',';
      if (k < d.inputs.size()) out << fmt(d.inputs[k](i));
    }
    out << "\r\n";
  }
}

}  // namespace impc::ident

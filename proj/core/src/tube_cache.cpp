#include "impc/errors.hpp"
#include "impc/tube.hpp"

#include <json.hpp>

#include <bit>
#include <cstdio>
#include <fstream>

namespace impc::tube {

namespace {

using nlohmann::json;

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void fnv_matrix(std::uint64_t& h, const Matrix& m) {
  const std::int64_t shape[2] = {m.rows(), m.cols()};
  fnv_bytes(h, shape, sizeof shape);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j) == 0.0 ? 0.0 : m(i, j);  // fold -0.0
      fnv_bytes(h, &v, sizeof v);
    }
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t unhex(const std::string& s) { return std::stoull(s, nullptr, 16); }

json encode(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(hex(std::bit_cast<std::uint64_t>(m(i, j))));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix decode(const json& rows, Index r, Index c) {
  if (!rows.is_array() || static_cast<Index>(rows.size()) != r) throw InvalidArgument("tube cache: bad shape");
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c) throw InvalidArgument("tube cache: bad shape");
    for (Index j = 0; j < c; ++j)
      m(i, j) = std::bit_cast<double>(unhex(row[static_cast<std::size_t>(j)].get<std::string>()));
  }
  return m;
}

}  // namespace

std::uint64_t cache_key(const ident::UncertainModel& model, const Matrix& k_gain, int n_max) {
  std::uint64_t h = kFnvOffset;
  fnv_matrix(h, model.a_hat);
  fnv_matrix(h, model.b_hat);
  fnv_matrix(h, model.delta_a);
  fnv_matrix(h, model.delta_b);
  fnv_matrix(h, Matrix(model.w_bar));
  fnv_matrix(h, k_gain);
  const std::int64_t nm = n_max;
  fnv_bytes(h, &nm, sizeof nm);
  return h;
}

void save_tables(const std::filesystem::path& path, std::uint64_t key, const TubeTables& tables) {
  json doc;
  doc["format"] = "impc-tube-1";
  doc["key"] = hex(key);
  doc["n_max"] = tables.n_max();
  doc["state_dim"] = tables.state_dim();
  doc["delta_cols"] = tables.delta_terms.empty() ? 0 : tables.delta_terms.front().cols();
  doc["delta_terms"] = json::array();
  for (const auto& d : tables.delta_terms) doc["delta_terms"].push_back(encode(d.radius()));
  doc["w_terms"] = json::array();
  for (const auto& w : tables.w_terms) doc["w_terms"].push_back(encode(Matrix(w.radius)));
  doc["w_cumulative"] = json::array();
  for (const auto& w : tables.w_cumulative) doc["w_cumulative"].push_back(encode(Matrix(w.radius)));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write tube cache " + path.string());
  out << doc.dump(1) << '\n';
}

std::optional<TubeTables> load_tables(const std::filesystem::path& path, std::uint64_t key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("tube cache " + path.string() + " is not valid JSON: " + e.what());
  }
  if (doc.value("format", "") != "impc-tube-1" || doc.value("key", "") != hex(key)) return std::nullopt;
  const int n_max = doc.at("n_max").get<int>();
  const Index n = doc.at("state_dim").get<Index>();
  const Index q = doc.at("delta_cols").get<Index>();
  TubeTables t;
  for (int j = 0; j < n_max; ++j) {
    t.delta_terms.push_back(setalg::IntervalMatrix::symmetric(decode(doc.at("delta_terms").at(j), n, q)));
    t.w_terms.push_back(setalg::Box::symmetric(decode(doc.at("w_terms").at(j), n, 1).col(0)));
  }
  for (int j = 0; j <= n_max; ++j)
    t.w_cumulative.push_back(setalg::Box::symmetric(decode(doc.at("w_cumulative").at(j), n, 1).col(0)));
  return t;
}

TubeTables cached_tube(const std::filesystem::path& dir, const ident::UncertainModel& model, const Matrix& k_gain,
                       int n_max) {
  const auto key = cache_key(model, k_gain, n_max);
  const auto path = dir / ("tube_" + hex(key) + ".json");
  if (auto hit = load_tables(path, key)) return *hit;
  auto tables = precompute_tube(model, k_gain, n_max);
  std::filesystem::create_directories(dir);
  save_tables(path, key, tables);
  return tables;
}

}  // namespace impc::tube

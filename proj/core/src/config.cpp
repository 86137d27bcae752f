#include "impc/config.hpp"

#include "impc/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace impc::harness {

using nlohmann::json;

std::string to_string(Scheme s) { return s == Scheme::DataDriven ? "DD-IMPC" : "SM-IMPC"; }
std::string to_string(DisturbanceLaw l) { return l == DisturbanceLaw::Uniform ? "uniform" : "vertex"; }

namespace {

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "expected an integer");
  return v.get<int>();
}

Vector vector(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field, "expected an array of numbers");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Index>(i)) = number(v[i], field + "[" + std::to_string(i) + "]");
  return out;
}

Matrix matrix(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a nonempty array of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) throw ConfigError(field, "rows must be nonempty arrays");
  Matrix out(static_cast<Index>(v.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || v[i].size() != cols) throw ConfigError(field, "rows must have equal length");
    for (std::size_t j = 0; j < cols; ++j)
      out(static_cast<Index>(i), static_cast<Index>(j)) =
          number(v[i][j], field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  return out;
}

// Either {"lower": [...], "upper": [...]} or {"H": [[...]], "b": [...]}.
Polytope polytope(const json& v, const std::string& field) {
  if (!v.is_object()) throw ConfigError(field, "expected an object with lower/upper or H/b");
  if (find(v, "lower") || find(v, "upper")) {
    if (!find(v, "lower") || !find(v, "upper")) throw ConfigError(field, "both lower and upper are required");
    const Vector lo = vector(v["lower"], field + ".lower");
    const Vector hi = vector(v["upper"], field + ".upper");
    if (lo.size() != hi.size()) throw ConfigError(field, "lower and upper differ in length");
    if ((hi - lo).minCoeff() < 0.0) throw ConfigError(field, "lower exceeds upper");
    return Polytope::box(lo, hi);
  }
  if (!find(v, "H") || !find(v, "b")) throw ConfigError(field, "expected lower/upper or H/b");
  const Matrix h = matrix(v["H"], field + ".H");
  const Vector b = vector(v["b"], field + ".b");
  if (h.rows() != b.size()) throw ConfigError(field, "H and b differ in row count");
  return Polytope(h, b);
}

}  // namespace

void ExperimentConfig::validate() const {
  const Index n = state_dim();
  const Index m = input_dim();
  if (n == 0 || m == 0) throw ConfigError("controller.K", "gain must be a nonempty m x n matrix");
  if (a_true.has_value() != b_true.has_value()) throw ConfigError("system", "both A and B are required");
  if (a_true && (a_true->rows() != n || a_true->cols() != n)) throw ConfigError("system.A", "must be n x n");
  if (b_true && (b_true->rows() != n || b_true->cols() != m)) throw ConfigError("system.B", "must be n x m");
  if (!dataset_path && !has_true_system())
    throw ConfigError("dataset", "a dataset path is required when no true system is given");
  if (data_length < n + m) throw ConfigError("dataset.T", "must be at least n + m");
  if (!(excitation_scale > 0.0)) throw ConfigError("dataset.excitation_scale", "must be positive");
  if (data_x0.size() != n) throw ConfigError("dataset.x0", "must have n entries");
  if (w_bar.size() != n) throw ConfigError("disturbance.w_bar", "must have n entries");
  if (w_bar.minCoeff() < 0.0) throw ConfigError("disturbance.w_bar", "must be nonnegative");
  if (!(epsilon_w > 0.0)) throw ConfigError("disturbance.epsilon_w", "must be positive");
  if (state_set.dim() != n) throw ConfigError("constraints.state", "dimension differs from the gain");
  if (input_set.dim() != m) throw ConfigError("constraints.input", "dimension differs from the gain");
  if (cost_weight.rows() != m || cost_weight.cols() != m) throw ConfigError("controller.cost_weight", "must be m x m");
  if (!(gamma > 0.0)) throw ConfigError("controller.gamma", "must be positive");
  if (n_max < 1) throw ConfigError("controller.n_max", "must be at least 1");
  if (!(eps > 0.0)) throw ConfigError("controller.eps", "must be positive");
  if (static_cast<Index>(grid.size()) != n) throw ConfigError("fd.grid", "needs one count per state");
  for (int g : grid)
    if (g < 2) throw ConfigError("fd.grid", "counts must be at least 2");
  if (fd_datasets < 1) throw ConfigError("fd.datasets", "must be at least 1");
  if (runs < 1) throw ConfigError("simulation.runs", "must be at least 1");
  if (steps < 1) throw ConfigError("simulation.steps", "must be at least 1");
  for (const auto& x : initial_states)
    if (x.size() != n) throw ConfigError("simulation.initial_states", "entries must have n components");
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!doc.is_object()) throw ConfigError("<document>", "top level must be an object");

  ExperimentConfig cfg;
  if (const auto* sys = find(doc, "system")) {
    if (const auto* a = find(*sys, "A")) cfg.a_true = matrix(*a, "system.A");
    if (const auto* b = find(*sys, "B")) cfg.b_true = matrix(*b, "system.B");
  }

  const json* ctl = find(doc, "controller");
  if (!ctl) throw ConfigError("controller", "section is required");
  if (!find(*ctl, "K")) throw ConfigError("controller.K", "is required");
  cfg.k_gain = matrix((*ctl)["K"], "controller.K");
  const Index n = cfg.k_gain.cols();
  const Index m = cfg.k_gain.rows();
  cfg.cost_weight = find(*ctl, "cost_weight") ? matrix((*ctl)["cost_weight"], "controller.cost_weight")
                                              : Matrix(Matrix::Identity(m, m));
  if (const auto* v = find(*ctl, "gamma")) cfg.gamma = number(*v, "controller.gamma");
  if (const auto* v = find(*ctl, "n_max")) cfg.n_max = integer(*v, "controller.n_max");
  if (const auto* v = find(*ctl, "eps")) cfg.eps = number(*v, "controller.eps");
  if (const auto* v = find(*ctl, "terminal")) {
    const auto s = v->is_string() ? v->get<std::string>() : "";
    if (s == "maximal") cfg.terminal = synth::TerminalMethod::Maximal;
    else if (s == "box") cfg.terminal = synth::TerminalMethod::Box;
    else throw ConfigError("controller.terminal", "expected \"maximal\" or \"box\"");
  }

  const json* cons = find(doc, "constraints");
  if (!cons || !find(*cons, "state") || !find(*cons, "input"))
    throw ConfigError("constraints", "state and input sets are required");
  cfg.state_set = polytope((*cons)["state"], "constraints.state");
  cfg.input_set = polytope((*cons)["input"], "constraints.input");

  const json* dist = find(doc, "disturbance");
  if (!dist || !find(*dist, "w_bar")) throw ConfigError("disturbance.w_bar", "is required");
  cfg.w_bar = vector((*dist)["w_bar"], "disturbance.w_bar");
  if (const auto* v = find(*dist, "epsilon_w")) cfg.epsilon_w = number(*v, "disturbance.epsilon_w");
  if (const auto* v = find(*dist, "law")) {
    const auto s = v->is_string() ? v->get<std::string>() : "";
    if (s == "uniform") cfg.disturbance_law = DisturbanceLaw::Uniform;
    else if (s == "vertex") cfg.disturbance_law = DisturbanceLaw::Vertex;
    else throw ConfigError("disturbance.law", "expected \"uniform\" or \"vertex\"");
  }

  cfg.data_x0 = Vector::Zero(n);
  if (const auto* ds = find(doc, "dataset")) {
    if (const auto* v = find(*ds, "path")) {
      if (!v->is_string()) throw ConfigError("dataset.path", "expected a string");
      std::filesystem::path p = v->get<std::string>();
      cfg.dataset_path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    }
    if (const auto* v = find(*ds, "T")) cfg.data_length = integer(*v, "dataset.T");
    if (const auto* v = find(*ds, "excitation_scale")) cfg.excitation_scale = number(*v, "dataset.excitation_scale");
    if (const auto* v = find(*ds, "x0")) cfg.data_x0 = vector(*v, "dataset.x0");
  }

  if (const auto* v = find(doc, "scheme")) {
    const auto s = v->is_string() ? v->get<std::string>() : "";
    if (s == "DD-IMPC") cfg.scheme = Scheme::DataDriven;
    else if (s == "SM-IMPC") cfg.scheme = Scheme::SetMembership;
    else throw ConfigError("scheme", "expected \"DD-IMPC\" or \"SM-IMPC\"");
  }

  if (const auto* sim = find(doc, "simulation")) {
    if (const auto* v = find(*sim, "runs")) cfg.runs = integer(*v, "simulation.runs");
    if (const auto* v = find(*sim, "steps")) cfg.steps = integer(*v, "simulation.steps");
    if (const auto* v = find(*sim, "initial_states")) {
      if (!v->is_array()) throw ConfigError("simulation.initial_states", "expected an array of states");
      for (std::size_t i = 0; i < v->size(); ++i)
        cfg.initial_states.push_back(vector((*v)[i], "simulation.initial_states[" + std::to_string(i) + "]"));
    }
  }
  if (const auto* fd = find(doc, "fd")) {
    if (const auto* v = find(*fd, "grid")) {
      if (!v->is_array()) throw ConfigError("fd.grid", "expected an array of counts");
      cfg.grid.clear();
      for (std::size_t i = 0; i < v->size(); ++i) cfg.grid.push_back(integer((*v)[i], "fd.grid"));
    }
    if (const auto* v = find(*fd, "datasets")) cfg.fd_datasets = integer(*v, "fd.datasets");
  }
  if (const auto* v = find(doc, "seed")) {
    if (!v->is_number_unsigned()) throw ConfigError("seed", "expected a nonnegative integer");
    cfg.seed = v->get<std::uint64_t>();
  }
  if (const auto* v = find(doc, "cache_dir")) {
    if (!v->is_string()) throw ConfigError("cache_dir", "expected a string");
    std::filesystem::path p = v->get<std::string>();
    cfg.cache_dir = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace impc::harness

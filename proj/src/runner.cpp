#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crlab/embeddings.hpp"
#include "crlab/runner.hpp"
#include "crlab/version.hpp"

namespace crlab {
namespace {

using nlohmann::ordered_json;

struct ConfigError {  // exit 2
  std::string code, field, message;
};
struct NumericalError {  // exit 3
  std::string code, field, message;
};

std::string error_record(const std::string& code, const std::string& field,
                         const std::string& message) {
  ordered_json e;
  e["error"]["code"] = code;
  e["error"]["field"] = field;
  e["error"]["message"] = message;
  return e.dump();
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const ordered_json& need(const ordered_json& j, const std::string& key,
                         const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError{"missing-field", path, "required field is missing"};
  return *it;
}

double num_param(const ordered_json& cfg, const std::string& key, double dflt,
                 bool require_positive = true) {
  const auto* params = cfg.contains("params") ? &cfg.at("params") : nullptr;
  double v = dflt;
  if (params && params->contains(key)) {
    if (!params->at(key).is_number())
      throw ConfigError{"invalid-param", "params." + key, "must be a number"};
    v = params->at(key).get<double>();
  }
  if (!std::isfinite(v))
    throw ConfigError{"invalid-param", "params." + key, "must be finite"};
  if (require_positive && v <= 0)
    throw ConfigError{"invalid-param", "params." + key, "must be positive"};
  return v;
}

int int_param(const ordered_json& cfg, const std::string& key, int dflt) {
  const auto* params = cfg.contains("params") ? &cfg.at("params") : nullptr;
  if (params && params->contains(key)) {
    if (!params->at(key).is_number_integer())
      throw ConfigError{"invalid-param", "params." + key, "must be an integer"};
    return params->at(key).get<int>();
  }
  return dflt;
}

ModelPtr make_model(const ordered_json& spec, const std::string& path) {
  if (!spec.is_object()) throw ConfigError{"invalid-model", path, "must be an object"};
  std::string name = need(spec, "name", path + ".name").get<std::string>();
  int n = need(spec, "n", path + ".n").get<int>();
  if (n < 1 || n > 3)
    throw ConfigError{"invalid-model", path + ".n", "n must be 1..3"};
  if (name == "heisenberg") return heisenberg_model(n);
  if (name == "sphere") return sphere_model(n);
  throw ConfigError{"unknown-model", path + ".name", "unknown model '" + name + "'"};
}

CREmbedding make_embedding(const ordered_json& spec, const std::string& path) {
  if (!spec.is_object()) throw ConfigError{"invalid-embedding", path, "must be an object"};
  std::string name = need(spec, "name", path + ".name").get<std::string>();
  if (name == "whitney") return whitney_embedding();
  if (name == "identity") return identity_embedding(make_model(need(spec, "model", path + ".model"), path + ".model"));
  int n = need(spec, "n", path + ".n").get<int>();
  int nhat = need(spec, "nhat", path + ".nhat").get<int>();
  if (name == "linear") return linear_sphere_embedding(n, nhat);
  if (name == "heisenberg-inclusion") return heisenberg_inclusion(n, nhat);
  throw ConfigError{"unknown-embedding", path + ".name", "unknown embedding '" + name + "'"};
}

Eigen::VectorXd parse_point(const ordered_json& j, int expect, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != expect)
    throw ConfigError{"invalid-point", path,
                      "expected an array of length " + std::to_string(expect)};
  Eigen::VectorXd p(expect);
  for (int i = 0; i < expect; ++i) p[i] = j.at(i).get<double>();
  return p;
}

Eigen::VectorXcd parse_cvector(const ordered_json& j, int expect, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != expect)
    throw ConfigError{"invalid-vector", path,
                      "expected an array of length " + std::to_string(expect)};
  Eigen::VectorXcd v(expect);
  for (int i = 0; i < expect; ++i) {
    const auto& e = j.at(i);
    if (e.is_array()) {
      if (e.size() != 2) throw ConfigError{"invalid-vector", path, "complex entries are [re, im]"};
      v[i] = Cd(e.at(0).get<double>(), e.at(1).get<double>());
    } else {
      v[i] = Cd(e.get<double>(), 0.0);
    }
  }
  return v;
}

ordered_json cvec_json(const Eigen::VectorXcd& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
  return a;
}

ordered_json cmat_json(const Eigen::MatrixXcd& m) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

ordered_json rvec_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

struct RunContext {
  std::string out_dir;
  std::uint64_t digest = 0;
  long seed = 0;
  std::vector<std::string>* artifacts = nullptr;

  std::string stamp() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "crlab %s digest=%016llx seed=%ld", kVersion,
                  static_cast<unsigned long long>(digest), seed);
    return buf;
  }

  std::string out_path(const ordered_json& cfg, const std::string& key,
                       const std::string& dflt) const {
    std::string name = dflt;
    if (cfg.contains("output") && cfg.at("output").contains(key))
      name = cfg.at("output").at(key).get<std::string>();
    return (std::filesystem::path(out_dir) / name).string();
  }

  void write_text(const std::string& path, const std::string& body) const {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw NumericalError{"io", "output", "cannot open " + path};
    f << body;
    if (!f.good()) throw NumericalError{"io", "output", "write failed for " + path};
    artifacts->push_back(path);
  }

  void write_csv(const std::string& path, const std::vector<std::string>& cols,
                 const std::vector<std::vector<double>>& rows) const {
    std::ostringstream os;
    os << "# " << stamp() << "\n";
    for (std::size_t i = 0; i < cols.size(); ++i)
      os << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i)
        os << fmt17(r[i]) << (i + 1 < r.size() ? "," : "\n");
    }
    write_text(path, os.str());
  }

  void write_json(const std::string& path, ordered_json payload) const {
    ordered_json root;
    root["tool"] = std::string("crlab ") + kVersion;
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    root["digest"] = buf;
    root["seed"] = seed;
    for (auto& [k, v] : payload.items()) root[k] = v;
    write_text(path, root.dump(2) + "\n");
  }
};

void check_status(IntegrationStatus st) {
  if (st == IntegrationStatus::DomainExit)
    throw NumericalError{"domain-exit", "task", "trajectory left the chart domain"};
  if (st == IntegrationStatus::BlowUp)
    throw NumericalError{"blow-up", "task", "chain coefficient blow-up"};
}

void task_chain(const ordered_json& cfg, const RunContext& ctx) {
  ModelPtr m = make_model(need(cfg, "model", "model"), "model");
  const auto& init = need(cfg, "initial", "initial");
  ChainState s;
  s.point = parse_point(need(init, "point", "initial.point"), m->dim(), "initial.point");
  s.a = parse_cvector(need(init, "a", "initial.a"), m->n(), "initial.a");
  double t_span = num_param(cfg, "t_span", 1.0);
  double step = num_param(cfg, "step", 1e-3);
  int cm_order = int_param(cfg, "cm_order", 2);
  if (!m->contains(s.point))
    throw ConfigError{"invalid-point", "initial.point", "outside the chart domain"};

  ChainTrajectory tr = integrate_chain(*m, s, t_span, step, 1e3, cm_order);
  check_status(tr.status);

  std::vector<std::string> cols{"t"};
  for (int i = 0; i < m->dim(); ++i) cols.push_back("x" + std::to_string(i));
  for (int i = 0; i < m->n(); ++i) {
    cols.push_back("re_a" + std::to_string(i));
    cols.push_back("im_a" + std::to_string(i));
  }
  const bool amb = m->has_ambient();
  if (amb)
    for (int i = 0; i <= m->n(); ++i) {
      cols.push_back("re_Z" + std::to_string(i));
      cols.push_back("im_Z" + std::to_string(i));
    }
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    std::vector<double> r{tr.samples[k].t};
    for (int i = 0; i < m->dim(); ++i) r.push_back(tr.samples[k].point[i]);
    for (int i = 0; i < m->n(); ++i) {
      r.push_back(tr.a[k][i].real());
      r.push_back(tr.a[k][i].imag());
    }
    if (amb)
      for (int i = 0; i <= m->n(); ++i) {
        r.push_back(tr.samples[k].ambient[i].real());
        r.push_back(tr.samples[k].ambient[i].imag());
      }
    rows.push_back(std::move(r));
  }
  ctx.write_csv(ctx.out_path(cfg, "csv", "chain.csv"), cols, rows);
}

void task_geodesic(const ordered_json& cfg, const RunContext& ctx) {
  ModelPtr m = make_model(need(cfg, "model", "model"), "model");
  const auto& init = need(cfg, "initial", "initial");
  ChartPoint base = parse_point(need(init, "point", "initial.point"), m->dim(), "initial.point");
  Eigen::VectorXcd a = parse_cvector(need(init, "a", "initial.a"), m->n(), "initial.a");
  double fiber = init.contains("fiber") ? init.at("fiber").get<double>() : 0.0;
  double t_span = num_param(cfg, "t_span", 1.0);
  double step = num_param(cfg, "step", 1e-3);
  double fd_step = num_param(cfg, "fd_step", 1e-5);
  if (!m->contains(base))
    throw ConfigError{"invalid-point", "initial.point", "outside the chart domain"};

  FeffermanState st = null_lift(*m, base, a, fiber);
  FeffermanTrajectory tr = integrate_null_geodesic(*m, st, t_span, step, fd_step);
  check_status(tr.status);

  const int D = 2 * m->n() + 2;
  std::vector<std::string> cols{"t"};
  for (int i = 0; i < D; ++i) cols.push_back("x" + std::to_string(i));
  for (int i = 0; i < D; ++i) cols.push_back("v" + std::to_string(i));
  cols.push_back("null_defect");
  std::vector<std::vector<double>> rows;
  for (const auto& smp : tr.samples) {
    std::vector<double> r{smp.t};
    for (int i = 0; i < D; ++i) r.push_back(smp.point[i]);
    for (int i = 0; i < D; ++i) r.push_back(smp.velocity[i]);
    r.push_back(smp.null_defect);
    rows.push_back(std::move(r));
  }
  ctx.write_csv(ctx.out_path(cfg, "csv", "geodesic.csv"), cols, rows);
}

void task_curvature_report(const ordered_json& cfg, const RunContext& ctx) {
  ModelPtr m = make_model(need(cfg, "model", "model"), "model");
  ChartPoint p = parse_point(need(need(cfg, "initial", "initial"), "point", "initial.point"),
                             m->dim(), "initial.point");
  if (!m->contains(p))
    throw ConfigError{"invalid-point", "initial.point", "outside the chart domain"};
  double step = num_param(cfg, "fd_step", 1e-3);

  CurvatureEval cv = curvature(*m, p, step);
  ChernMoserEval cm = chern_moser(*m, p, step);
  double w1 = 0, w2 = 0;
  for (const auto& v : cv.W1) w1 = std::max(w1, v.cwiseAbs().maxCoeff());
  for (const auto& v : cv.W2) w2 = std::max(w2, v.cwiseAbs().maxCoeff());

  ordered_json rep;
  rep["model"] = m->name();
  rep["n"] = m->n();
  rep["point"] = rvec_json(p);
  rep["scalar"] = cv.scalar;
  rep["ricci"] = cmat_json(cv.ricci);
  rep["pe_residual"] = pseudo_einstein_residual(cv);
  rep["expansion_residual"] = cv.expansion_residual;
  rep["w1_max"] = w1;
  rep["w2_max"] = w2;
  rep["D"] = cmat_json(cm.D);
  rep["E"] = cvec_json(cm.E);
  rep["d_norm"] = cm.D.norm();
  rep["e_norm"] = cm.E.norm();
  ctx.write_json(ctx.out_path(cfg, "json", "curvature.json"), rep);
}

ordered_json embedding_report(const CREmbedding& emb, const ordered_json& cfg,
                              const ChartPoint& p, const ChartPoint& sweep_base) {
  double eps1 = num_param(cfg, "eps1", 1e-4);
  double eps2 = num_param(cfg, "eps2", 1e-7);
  double eps3 = num_param(cfg, "eps3", 1e-8);
  double t_span = num_param(cfg, "t_span", 1.0);
  double step = num_param(cfg, "step", 2e-3);
  int phases = int_param(cfg, "phases", 5);
  // safe chain amplitudes from the chart pole: |z|_max = 4r/(1+4r^2)
  std::vector<double> radii{0.2, 1.0};
  if (cfg.contains("params") && cfg.at("params").contains("radii")) {
    radii.clear();
    for (const auto& r : cfg.at("params").at("radii")) radii.push_back(r.get<double>());
  }

  AdaptedPair pair = adapt_coframes(emb, p);
  SecondFundamentalForm sff = second_fundamental_form(pair, p);
  LiftConditionResult lift = lift_condition(pair, p, eps2);
  double sweep = chain_preservation_sweep(emb, sweep_base, radii, phases, t_span, step);

  bool chain_ok = sweep < eps1;
  bool tg = sff.norm() < eps3;
  ordered_json rep;
  rep["embedding"] = emb.name;
  rep["point"] = rvec_json(p);
  rep["lambda"] = pair.lambda;
  rep["adapted_residuals"] = {{"theta", pair.theta_residual},
                              {"holomorphic", pair.holo_residual},
                              {"normal", pair.normal_residual}};
  rep["sff_norm"] = sff.norm();
  rep["lift_residual"] = lift.c_norm;
  rep["trace_residual"] = lift.trace_residual;
  rep["chain_sweep_max"] = sweep;
  rep["verdicts"] = {{"chain_preserving", chain_ok},
                     {"lift_exists", lift.lift_exists},
                     {"totally_geodesic", tg},
                     {"pairwise_agree", chain_ok == lift.lift_exists && lift.lift_exists == tg}};
  return rep;
}

ChartPoint default_point(const CREmbedding& emb, bool for_sweep) {
  ChartPoint p = ChartPoint::Zero(emb.source->dim());
  if (!for_sweep && emb.name == "whitney") p << 0.35, 0.0, 0.2;
  return p;
}

void task_embed_verify(const ordered_json& cfg, const RunContext& ctx) {
  CREmbedding emb = make_embedding(need(cfg, "embedding", "embedding"), "embedding");
  const auto* init = cfg.contains("initial") ? &cfg.at("initial") : nullptr;
  ChartPoint p = init && init->contains("point")
                     ? parse_point(init->at("point"), emb.source->dim(), "initial.point")
                     : default_point(emb, false);
  ChartPoint sb = init && init->contains("sweep_point")
                      ? parse_point(init->at("sweep_point"), emb.source->dim(), "initial.sweep_point")
                      : default_point(emb, true);
  ctx.write_json(ctx.out_path(cfg, "json", "embed.json"), embedding_report(emb, cfg, p, sb));
}

void task_suite(const ordered_json& cfg, const RunContext& ctx) {
  std::string name = cfg.contains("suite") ? cfg.at("suite").get<std::string>() : "theorem1";
  if (name != "theorem1")
    throw ConfigError{"unknown-suite", "suite", "unknown suite '" + name + "'"};

  ordered_json results = ordered_json::array();
  bool consistent = true;
  for (const CREmbedding& emb : {linear_sphere_embedding(1, 2), whitney_embedding()}) {
    ordered_json rep = embedding_report(emb, cfg, default_point(emb, false), default_point(emb, true));
    consistent = consistent && rep["verdicts"]["pairwise_agree"].get<bool>();
    results.push_back(std::move(rep));
  }
  ordered_json rep;
  rep["suite"] = name;
  rep["results"] = std::move(results);
  rep["consistent"] = consistent;
  ctx.write_json(ctx.out_path(cfg, "json", "suite.json"), rep);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RunOutcome run_config(const ordered_json& cfg, const std::string& out_dir,
                      std::uint64_t digest, std::optional<long> seed_override) {
  RunOutcome out;
  RunContext ctx;
  ctx.out_dir = out_dir.empty() ? "." : out_dir;
  ctx.digest = digest;
  ctx.artifacts = &out.artifacts;
  try {
    if (!cfg.is_object()) throw ConfigError{"parse", "", "config must be a JSON object"};
    long seed = 12345;
    if (cfg.contains("seed")) {
      if (!cfg.at("seed").is_number_integer())
        throw ConfigError{"invalid-param", "seed", "must be an integer"};
      seed = cfg.at("seed").get<long>();
    }
    ctx.seed = seed_override.value_or(seed);

    std::string task = need(cfg, "task", "task").get<std::string>();
    if (task == "chain")
      task_chain(cfg, ctx);
    else if (task == "geodesic")
      task_geodesic(cfg, ctx);
    else if (task == "curvature-report")
      task_curvature_report(cfg, ctx);
    else if (task == "embed-verify")
      task_embed_verify(cfg, ctx);
    else if (task == "suite")
      task_suite(cfg, ctx);
    else
      throw ConfigError{"unknown-task", "task", "unknown task '" + task + "'"};
  } catch (const ConfigError& e) {
    out.exit_code = 2;
    out.error_json = error_record(e.code, e.field, e.message);
  } catch (const NumericalError& e) {
    out.exit_code = 3;
    out.error_json = error_record(e.code, e.field, e.message);
  } catch (const nlohmann::json::exception& e) {
    out.exit_code = 2;
    out.error_json = error_record("parse", "", e.what());
  } catch (const std::exception& e) {
    out.exit_code = 3;
    out.error_json = error_record("runtime", "", e.what());
  }
  return out;
}

RunOutcome run_config_file(const std::string& path, const std::string& out_dir,
                           std::optional<long> seed_override) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    RunOutcome out;
    out.exit_code = 2;
    out.error_json = error_record("io", "config", "cannot read " + path);
    return out;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();

  ordered_json cfg;
  try {
    cfg = ordered_json::parse(text);
  } catch (const std::exception& e) {
    RunOutcome out;
    out.exit_code = 2;
    out.error_json = error_record("parse", "", e.what());
    return out;
  }
  return run_config(cfg, out_dir, fnv1a64(text), seed_override);
}

}  // namespace crlab

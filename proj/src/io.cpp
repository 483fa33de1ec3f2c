#include "varma/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "varma/rng.hpp"

namespace varma::io {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(strip(line.substr(start)));
      return out;
    }
    out.push_back(strip(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

[[noreturn]] void fail_at(const std::string& path, long line,
                          const std::string& message) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + message);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_level(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

PanelData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");

  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) fail_at(path, 1, "empty file, header expected");
  ++line_no;
  const std::vector<std::string> names = split_fields(line);
  const std::size_t d = names.size();
  for (std::size_t j = 0; j < d; ++j)
    if (names[j].empty())
      fail_at(path, line_no, "empty header field " + std::to_string(j + 1));

  std::vector<double> cells;
  long rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) {
      if (in.eof()) break;  // tolerate one trailing newline
      fail_at(path, line_no, "blank line inside the data block");
    }
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != d)
      fail_at(path, line_no,
              "expected " + std::to_string(d) + " fields, got " +
                  std::to_string(fields.size()));
    for (std::size_t j = 0; j < d; ++j) {
      const std::string& f = fields[j];
      if (f.empty())
        fail_at(path, line_no, "missing value in column " + names[j]);
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
        fail_at(path, line_no,
                "non-numeric cell '" + f + "' in column " + names[j]);
      cells.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) fail_at(path, line_no, "no data rows after the header");

  PanelData data;
  data.names = names;
  data.values.resize(rows, static_cast<long>(d));
  for (long t = 0; t < rows; ++t)
    for (std::size_t j = 0; j < d; ++j)
      data.values(t, static_cast<long>(j)) = cells[t * d + j];
  data.validate();
  return data;
}

void write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp + ": cannot open for writing");
    out << content;
    if (!out) throw std::runtime_error(tmp + ": write failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error(path + ": rename from temporary failed");
}

void write_csv(const std::string& path, const PanelData& data) {
  data.validate();
  const long d = data.dim();
  std::ostringstream out;
  for (long j = 0; j < d; ++j) {
    if (j) out << ',';
    out << (data.names.empty() ? "y" + std::to_string(j + 1) : data.names[j]);
  }
  out << '\n';
  for (long t = 0; t < data.T(); ++t) {
    for (long j = 0; j < d; ++j) {
      if (j) out << ',';
      out << format_double(data.values(t, j));
    }
    out << '\n';
  }
  write_text(path, out.str());
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (long i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array())
    throw std::runtime_error(std::string(what) + ": expected a matrix");
  const long rows = static_cast<long>(j.size());
  long cols = -1;
  for (long i = 0; i < rows; ++i) {
    if (!j[i].is_array())
      throw std::runtime_error(std::string(what) + ": row " +
                               std::to_string(i) + " is not an array");
    if (cols < 0)
      cols = static_cast<long>(j[i].size());
    else if (static_cast<long>(j[i].size()) != cols)
      throw std::runtime_error(std::string(what) + ": ragged rows");
  }
  Eigen::MatrixXd m(rows, std::max<long>(cols, 0));
  for (long i = 0; i < rows; ++i)
    for (long c = 0; c < cols; ++c) {
      if (!j[i][c].is_number())
        throw std::runtime_error(std::string(what) + ": non-numeric entry");
      m(i, c) = j[i][c].get<double>();
    }
  return m;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array())
    throw std::runtime_error(std::string(what) + ": expected an array");
  Eigen::VectorXd v(static_cast<long>(j.size()));
  for (long i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

const char* penalty_name(PenaltyKind kind) {
  return kind == PenaltyKind::l1 ? "l1" : "hlag";
}

PenaltyKind penalty_from_name(const std::string& name) {
  if (name == "l1") return PenaltyKind::l1;
  if (name == "hlag") return PenaltyKind::hlag;
  throw std::runtime_error("unknown penalty kind '" + name + "'");
}

nlohmann::json scaling_to_json(const Scaling& s) {
  return {{"standardized", s.standardized},
          {"mean", vector_to_json(s.mean)},
          {"sd", vector_to_json(s.sd)},
          {"degenerate", s.degenerate}};
}

Scaling scaling_from_json(const nlohmann::json& j) {
  Scaling s;
  s.standardized = j.at("standardized").get<bool>();
  s.mean = vector_from_json(j.at("mean"), "scaling.mean");
  s.sd = vector_from_json(j.at("sd"), "scaling.sd");
  s.degenerate = j.at("degenerate").get<bool>();
  return s;
}

}  // namespace

nlohmann::json cv_to_json(const CvReport& report) {
  nlohmann::json points = nlohmann::json::array();
  for (const CvGridPoint& p : report.points)
    points.push_back({{"lambda_total", p.lambda_total},
                      {"lambda_theta", p.lambda_theta}});
  return {{"points", std::move(points)},
          {"msfe", report.msfe},
          {"se", report.se},
          {"min_index", report.min_index},
          {"chosen", report.chosen},
          {"rule", report.rule == CvRule::min ? "min" : "one_se"},
          {"origins", report.origins},
          {"first_origin", report.first_origin}};
}

CvReport cv_from_json(const nlohmann::json& j) {
  CvReport r;
  for (const auto& p : j.at("points"))
    r.points.push_back({p.at("lambda_total").get<double>(),
                        p.at("lambda_theta").get<double>()});
  r.msfe = j.at("msfe").get<std::vector<double>>();
  r.se = j.at("se").get<std::vector<double>>();
  r.min_index = j.at("min_index").get<int>();
  r.chosen = j.at("chosen").get<int>();
  if (j.contains("rule"))
    r.rule = j.at("rule") == "min" ? CvRule::min : CvRule::one_se;
  r.origins = j.at("origins").get<int>();
  r.first_origin = j.at("first_origin").get<int>();
  return r;
}

nlohmann::json fit_to_json(const TwoPhaseFit& fit) {
  nlohmann::json j;
  j["schema"] = "varma-fit/1";
  j["penalty"] = penalty_name(fit.penalty);
  j["orders"] = {{"p_tilde", fit.orders.p_tilde},
                 {"p", fit.orders.p},
                 {"q", fit.orders.q}};
  j["scaling"] = scaling_to_json(fit.phase2.scaling);
  j["innovations"] = matrix_to_json(fit.innovations);
  j["innovations_start"] = fit.innovations_start;
  if (fit.phase1) {
    j["phase1"] = {{"pi", matrix_to_json(fit.phase1->pi_hat)},
                   {"p_tilde", fit.phase1->p_tilde},
                   {"lambda", fit.phase1->lambda},
                   {"residuals", matrix_to_json(fit.phase1->residuals)},
                   {"residual_start", fit.phase1->residual_start},
                   {"cv", cv_to_json(fit.phase1->cv)},
                   {"degenerate_regressors",
                    fit.phase1->degenerate_regressors}};
  } else {
    j["phase1"] = nullptr;
  }
  j["phase2"] = {{"phi", matrix_to_json(fit.phase2.phi_hat)},
                 {"theta", matrix_to_json(fit.phase2.theta_hat)},
                 {"p", fit.phase2.p},
                 {"q", fit.phase2.q},
                 {"lambda_phi", fit.phase2.lambda_phi},
                 {"lambda_theta", fit.phase2.lambda_theta},
                 {"residuals", matrix_to_json(fit.phase2.residuals)},
                 {"residual_start", fit.phase2.residual_start},
                 {"cv", cv_to_json(fit.phase2.cv)}};
  return j;
}

TwoPhaseFit fit_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != std::string("varma-fit/1"))
    throw std::runtime_error("fit archive: unsupported schema");
  TwoPhaseFit fit;
  fit.penalty = penalty_from_name(j.at("penalty").get<std::string>());
  fit.orders.p_tilde = j.at("orders").at("p_tilde").get<int>();
  fit.orders.p = j.at("orders").at("p").get<int>();
  fit.orders.q = j.at("orders").at("q").get<int>();
  const Scaling scaling = scaling_from_json(j.at("scaling"));
  fit.innovations = matrix_from_json(j.at("innovations"), "innovations");
  fit.innovations_start = j.at("innovations_start").get<int>();
  if (!j.at("phase1").is_null()) {
    const nlohmann::json& p1 = j.at("phase1");
    Phase1Result r;
    r.pi_hat = matrix_from_json(p1.at("pi"), "phase1.pi");
    r.p_tilde = p1.at("p_tilde").get<int>();
    r.lambda = p1.at("lambda").get<double>();
    r.residuals = matrix_from_json(p1.at("residuals"), "phase1.residuals");
    r.residual_start = p1.at("residual_start").get<int>();
    r.cv = cv_from_json(p1.at("cv"));
    r.degenerate_regressors = p1.at("degenerate_regressors").get<bool>();
    r.scaling = scaling;
    fit.phase1 = std::move(r);
  }
  const nlohmann::json& p2 = j.at("phase2");
  fit.phase2.phi_hat = matrix_from_json(p2.at("phi"), "phase2.phi");
  fit.phase2.theta_hat = matrix_from_json(p2.at("theta"), "phase2.theta");
  fit.phase2.p = p2.at("p").get<int>();
  fit.phase2.q = p2.at("q").get<int>();
  fit.phase2.lambda_phi = p2.at("lambda_phi").get<double>();
  fit.phase2.lambda_theta = p2.at("lambda_theta").get<double>();
  fit.phase2.residuals = matrix_from_json(p2.at("residuals"),
                                          "phase2.residuals");
  fit.phase2.residual_start = p2.at("residual_start").get<int>();
  fit.phase2.cv = cv_from_json(p2.at("cv"));
  fit.phase2.scaling = scaling;
  return fit;
}

nlohmann::json target_to_json(const IdentTarget& target) {
  return {{"schema", "varma-identify/1"},
          {"phi", matrix_to_json(target.phi)},
          {"theta", matrix_to_json(target.theta)},
          {"alpha_used", target.alpha_used},
          {"objective", target.objective},
          {"constraint_violation", target.constraint_violation},
          {"iterations", target.iterations}};
}

nlohmann::json sim_sidecar(const std::string& dgp, const DgpSpec& spec, int T,
                           int burn_in, std::uint64_t seed) {
  nlohmann::json j;
  j["schema"] = "varma-sim/1";
  j["dgp"] = dgp;
  j["d"] = spec.d;
  j["p"] = spec.p;
  j["q"] = spec.q;
  j["theta"] = spec.theta;
  j["T"] = T;
  j["burn_in"] = burn_in;
  j["seed"] = seed;
  j["rng"] = GaussianSampler::algorithm;
  return j;
}

nlohmann::json study_to_json(const StudyResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  for (const StudyCell& c : result.cells) {
    cells.push_back({{"factor", c.factor},
                     {"level", c.level},
                     {"estimators", c.names},
                     {"errors", matrix_to_json(c.errors)},
                     {"msfe", c.msfe},
                     {"paired_stat", c.paired_stat},
                     {"paired_p", c.paired_p},
                     {"failures", c.failures}});
  }
  return {{"schema", "varma-study/1"},
          {"T", result.spec.T},
          {"N", result.spec.N},
          {"penalty", penalty_name(result.spec.penalty)},
          {"master_seed", result.spec.master_seed},
          {"rng", GaussianSampler::algorithm},
          {"cells", std::move(cells)}};
}

std::string study_to_csv(const StudyResult& result) {
  std::ostringstream out;
  out << "estimator";
  for (const StudyCell& c : result.cells) {
    const std::string label =
        c.factor.empty() ? "" : "[" + c.factor + "=" + format_level(c.level) +
                                    "]";
    out << ",msfe" << label << ",p" << label;
  }
  out << '\n';
  if (result.cells.empty()) return out.str();
  const std::size_t E = result.cells.front().names.size();
  for (std::size_t e = 0; e < E; ++e) {
    out << result.cells.front().names[e];
    for (const StudyCell& c : result.cells)
      out << ',' << format_double(c.msfe[e]) << ','
          << format_double(c.paired_p[e]);
    out << '\n';
  }
  return out.str();
}

nlohmann::json eval_to_json(const EvalResult& result) {
  nlohmann::json j;
  j["schema"] = "varma-eval/1";
  j["estimators"] = result.names;
  j["horizons"] = result.horizons;
  j["msfe"] = matrix_to_json(result.msfe_table);
  j["failures"] = result.failures;
  j["first_origin"] = result.first_origin;
  nlohmann::json losses = nlohmann::json::array();
  for (const auto& per_est : result.losses) losses.push_back(per_est);
  j["losses"] = std::move(losses);
  return j;
}

std::string eval_to_csv(const EvalResult& result) {
  std::ostringstream out;
  out << "estimator";
  for (int h : result.horizons) out << ",h=" << h;
  out << '\n';
  for (std::size_t e = 0; e < result.names.size(); ++e) {
    out << result.names[e];
    for (long k = 0; k < result.msfe_table.cols(); ++k)
      out << ',' << format_double(result.msfe_table(static_cast<long>(e), k));
    out << '\n';
  }
  return out.str();
}

}  // namespace varma::io

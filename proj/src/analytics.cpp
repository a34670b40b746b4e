#include "analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "error.hpp"

namespace traitlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_number(const std::string& s, const std::string& where) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    fail(errc::bad_data, where + ": not a number: \"" + s + "\"");
  }
  return v;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) fail(errc::bad_data, "no rows in " + path);
  return rows;
}

}  // namespace

TraitMatrix TraitMatrix::load_csv(const std::string& path) {
  auto rows = read_csv(path);
  const auto& header = rows[0];
  const std::vector<std::string> expected = {"model", "O", "C",
                                             "E",     "A", "N"};
  if (std::vector<std::string>(header.begin(), header.end()) != expected) {
    fail(errc::bad_data, path + ": header must be model,O,C,E,A,N");
  }
  TraitMatrix m;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 6) {
      fail(errc::bad_data, path + ": row " + std::to_string(i) +
                               " must have 6 fields");
    }
    if (!seen.insert(rows[i][0]).second) {
      fail(errc::bad_data, path + ": duplicate model id " + rows[i][0]);
    }
    m.models.push_back(rows[i][0]);
    std::array<double, kTraitCount> v{};
    for (int t = 0; t < kTraitCount; ++t) {
      v[t] = parse_number(rows[i][t + 1], path);
      if (v[t] < 1.0 || v[t] > 5.0) {
        fail(errc::bad_data,
             path + ": trait scores must lie in [1,5], got " +
                 rows[i][t + 1]);
      }
    }
    m.values.push_back(v);
  }
  if (m.rows() < 2) fail(errc::bad_data, path + ": need at least 2 rows");
  return m;
}

void TraitMatrix::drop_row(const std::string& model) {
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i] == model) {
      models.erase(models.begin() + i);
      values.erase(values.begin() + i);
      return;
    }
  }
  fail(errc::invalid_argument, "no such model row: " + model);
}

PerformanceTable PerformanceTable::load_csv(const std::string& path) {
  auto rows = read_csv(path);
  const auto& header = rows[0];
  if (header.size() < 2 || header[0] != "model") {
    fail(errc::bad_data, path + ": header must be model,<domain...>");
  }
  PerformanceTable p;
  p.domains.assign(header.begin() + 1, header.end());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != header.size()) {
      fail(errc::bad_data, path + ": row " + std::to_string(i) +
                               " has the wrong field count");
    }
    if (!seen.insert(rows[i][0]).second) {
      fail(errc::bad_data, path + ": duplicate model id " + rows[i][0]);
    }
    p.models.push_back(rows[i][0]);
    std::vector<double> acc;
    for (std::size_t d = 1; d < rows[i].size(); ++d) {
      double v = parse_number(rows[i][d], path);
      if (v < 0.0 || v > 1.0) {
        fail(errc::bad_data,
             path + ": accuracies must lie in [0,1], got " + rows[i][d]);
      }
      acc.push_back(v);
    }
    p.acc.push_back(std::move(acc));
  }
  return p;
}

void PerformanceTable::drop_row(const std::string& model) {
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i] == model) {
      models.erase(models.begin() + i);
      acc.erase(acc.begin() + i);
      return;
    }
  }
  fail(errc::invalid_argument, "no such model row: " + model);
}

int PerformanceTable::domain_index(const std::string& name) const {
  for (std::size_t i = 0; i < domains.size(); ++i) {
    if (domains[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CorrelationResult pearson(const std::vector<double>& x,
                          const std::vector<double>& y) {
  if (x.size() != y.size()) {
    fail(errc::length_mismatch, "pearson inputs differ in length");
  }
  std::size_t n = x.size();
  if (n < 3) fail(errc::too_few_points, "pearson needs at least 3 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    fail(errc::zero_variance, "pearson input has zero variance");
  }
  double r = sxy / std::sqrt(sxx * syy);
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  return {r, n};
}

namespace {

struct Joined {
  std::vector<std::array<double, kTraitCount>> traits;
  std::vector<std::vector<double>> acc;  // aligned with perf.domains
};

Joined join_by_model(const TraitMatrix& traits, const PerformanceTable& perf,
                     std::vector<std::string>* models_out = nullptr) {
  std::unordered_map<std::string, std::size_t> perf_row;
  for (std::size_t i = 0; i < perf.models.size(); ++i) {
    perf_row[perf.models[i]] = i;
  }
  Joined j;
  for (std::size_t i = 0; i < traits.models.size(); ++i) {
    auto it = perf_row.find(traits.models[i]);
    if (it == perf_row.end()) continue;
    j.traits.push_back(traits.values[i]);
    j.acc.push_back(perf.acc[it->second]);
    if (models_out) models_out->push_back(traits.models[i]);
  }
  if (j.traits.empty()) {
    fail(errc::join_empty, "no model ids shared between the two tables");
  }
  return j;
}

int require_domain(const PerformanceTable& perf, const std::string& domain) {
  int d = perf.domain_index(domain);
  if (d < 0) fail(errc::unknown_domain, "unknown domain: " + domain);
  return d;
}

}  // namespace

std::array<CorrelationResult, kTraitCount> single_trait_correlations(
    const TraitMatrix& traits, const PerformanceTable& perf,
    const std::string& domain) {
  int d = require_domain(perf, domain);
  Joined j = join_by_model(traits, perf);
  std::vector<double> p;
  for (const auto& row : j.acc) p.push_back(row[d]);
  std::array<CorrelationResult, kTraitCount> out;
  for (int t = 0; t < kTraitCount; ++t) {
    std::vector<double> col;
    for (const auto& row : j.traits) col.push_back(row[t]);
    out[t] = pearson(col, p);
  }
  return out;
}

CorrelationMatrix correlation_matrix(const TraitMatrix& traits,
                                     const PerformanceTable& perf) {
  Joined j = join_by_model(traits, perf);
  CorrelationMatrix m;
  m.domains = perf.domains;
  m.n = j.traits.size();
  for (std::size_t d = 0; d < perf.domains.size(); ++d) {
    std::vector<double> p;
    for (const auto& row : j.acc) p.push_back(row[d]);
    for (int t = 0; t < kTraitCount; ++t) {
      std::vector<double> col;
      for (const auto& row : j.traits) col.push_back(row[t]);
      m.r[t].push_back(pearson(col, p).r);
    }
  }
  return m;
}

std::string correlation_matrix_csv(const CorrelationMatrix& m) {
  std::string out = "# joined_rows=" + std::to_string(m.n) + "\ntrait";
  for (const auto& d : m.domains) out += "," + d;
  out += "\n";
  char buf[32];
  for (int t = 0; t < kTraitCount; ++t) {
    out += trait_letter(static_cast<TraitDim>(t));
    for (std::size_t d = 0; d < m.domains.size(); ++d) {
      std::snprintf(buf, sizeof(buf), ",%.6f", m.r[t][d]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

OlsFit paired_trait_ols(const TraitMatrix& traits,
                        const PerformanceTable& perf,
                        const std::string& domain, TraitDim j, TraitDim k) {
  if (j == k) fail(errc::same_trait, "paired fit needs two distinct traits");
  int d = require_domain(perf, domain);
  Joined joined = join_by_model(traits, perf);
  std::size_t n = joined.traits.size();
  if (n < 4) fail(errc::too_few_points, "paired fit needs at least 4 rows");

  std::vector<double> tj, tk, y;
  for (std::size_t i = 0; i < n; ++i) {
    tj.push_back(joined.traits[i][static_cast<int>(j)]);
    tk.push_back(joined.traits[i][static_cast<int>(k)]);
    y.push_back(joined.acc[i][d]);
  }
  double mj = 0, mk = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mj += tj[i];
    mk += tk[i];
    my += y[i];
  }
  mj /= n;
  mk /= n;
  my /= n;
  double sjj = 0, skk = 0, sjk = 0, sjy = 0, sky = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double a = tj[i] - mj;
    double b = tk[i] - mk;
    double c = y[i] - my;
    sjj += a * a;
    skk += b * b;
    sjk += a * b;
    sjy += a * c;
    sky += b * c;
  }
  double det = sjj * skk - sjk * sjk;
  if (!(det > 1e-12 * std::max(sjj * skk, 1e-300))) {
    fail(errc::singular, "trait columns are collinear or constant");
  }

  OlsFit fit;
  fit.j = j;
  fit.k = k;
  fit.n = n;
  fit.beta_j = (skk * sjy - sjk * sky) / det;
  fit.beta_k = (sjj * sky - sjk * sjy) / det;
  fit.beta0 = my - fit.beta_j * mj - fit.beta_k * mk;

  std::vector<double> combo;
  for (std::size_t i = 0; i < n; ++i) {
    double pred = fit.beta0 + fit.beta_j * tj[i] + fit.beta_k * tk[i];
    double resid = y[i] - pred;
    fit.rss += resid * resid;
    combo.push_back(fit.beta_j * tj[i] + fit.beta_k * tk[i]);
  }
  try {
    fit.combo_rho = std::max(pearson(combo, y).r, 0.0);
  } catch (const error& e) {
    if (e.code() != errc::zero_variance) throw;
    fit.combo_rho = 0.0;  // both betas vanish; no linear signal
  }
  return fit;
}

std::vector<OlsFit> paired_trait_sweep(const TraitMatrix& traits,
                                       const PerformanceTable& perf,
                                       const std::string& domain) {
  std::vector<OlsFit> fits;
  for (int j = 0; j < kTraitCount; ++j) {
    for (int k = j + 1; k < kTraitCount; ++k) {
      fits.push_back(paired_trait_ols(traits, perf, domain,
                                      static_cast<TraitDim>(j),
                                      static_cast<TraitDim>(k)));
    }
  }
  return fits;
}

std::string ols_fit_json(const OlsFit& fit, const std::string& domain) {
  nlohmann::json j{
      {"domain", domain},
      {"j", std::string(1, trait_letter(fit.j))},
      {"k", std::string(1, trait_letter(fit.k))},
      {"beta0", fit.beta0},
      {"beta_j", fit.beta_j},
      {"beta_k", fit.beta_k},
      {"rss", fit.rss},
      {"combo_rho", fit.combo_rho},
      {"n", fit.n},
  };
  return j.dump();
}

namespace {

// Cyclic Jacobi on a 5x5 symmetric matrix; a is destroyed, v gets the
// eigenvectors as columns.
void jacobi5(double a[kTraitCount][kTraitCount],
             double v[kTraitCount][kTraitCount],
             double d[kTraitCount]) {
  for (int i = 0; i < kTraitCount; ++i) {
    for (int j = 0; j < kTraitCount; ++j) v[i][j] = i == j ? 1.0 : 0.0;
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < kTraitCount; ++p) {
      for (int q = p + 1; q < kTraitCount; ++q) {
        off = std::max(off, std::abs(a[p][q]));
      }
    }
    if (off < 1e-12) break;
    for (int p = 0; p < kTraitCount; ++p) {
      for (int q = p + 1; q < kTraitCount; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int i = 0; i < kTraitCount; ++i) {
          double aip = a[i][p];
          double aiq = a[i][q];
          a[i][p] = c * aip - s * aiq;
          a[i][q] = s * aip + c * aiq;
        }
        for (int i = 0; i < kTraitCount; ++i) {
          double api = a[p][i];
          double aqi = a[q][i];
          a[p][i] = c * api - s * aqi;
          a[q][i] = s * api + c * aqi;
        }
        for (int i = 0; i < kTraitCount; ++i) {
          double vip = v[i][p];
          double viq = v[i][q];
          v[i][p] = c * vip - s * viq;
          v[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  for (int i = 0; i < kTraitCount; ++i) d[i] = a[i][i];
}

}  // namespace

PcaResult pca_2d(const TraitMatrix& traits, bool standardized) {
  std::size_t n = traits.rows();
  if (n < 3) fail(errc::too_few_points, "pca needs at least 3 rows");

  std::array<double, kTraitCount> mean{};
  for (const auto& row : traits.values) {
    for (int t = 0; t < kTraitCount; ++t) mean[t] += row[t];
  }
  for (int t = 0; t < kTraitCount; ++t) mean[t] /= static_cast<double>(n);

  std::array<double, kTraitCount> scale;
  scale.fill(1.0);
  if (standardized) {
    std::array<double, kTraitCount> var{};
    for (const auto& row : traits.values) {
      for (int t = 0; t < kTraitCount; ++t) {
        var[t] += (row[t] - mean[t]) * (row[t] - mean[t]);
      }
    }
    for (int t = 0; t < kTraitCount; ++t) {
      var[t] /= static_cast<double>(n);
      if (var[t] <= 0.0) {
        fail(errc::zero_variance_column,
             std::string("constant trait column ") +
                 trait_letter(static_cast<TraitDim>(t)));
      }
      scale[t] = std::sqrt(var[t]);
    }
  }

  std::vector<std::array<double, kTraitCount>> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 0; t < kTraitCount; ++t) {
      x[i][t] = (traits.values[i][t] - mean[t]) / scale[t];
    }
  }

  double cov[kTraitCount][kTraitCount] = {};
  for (std::size_t i = 0; i < n; ++i) {
    for (int p = 0; p < kTraitCount; ++p) {
      for (int q = p; q < kTraitCount; ++q) {
        cov[p][q] += x[i][p] * x[i][q];
      }
    }
  }
  for (int p = 0; p < kTraitCount; ++p) {
    for (int q = p; q < kTraitCount; ++q) {
      cov[p][q] /= static_cast<double>(n);
      cov[q][p] = cov[p][q];
    }
  }

  double v[kTraitCount][kTraitCount];
  double d[kTraitCount];
  jacobi5(cov, v, d);

  int order[kTraitCount] = {0, 1, 2, 3, 4};
  std::sort(order, order + kTraitCount,
            [&](int a, int b) { return d[a] > d[b]; });

  PcaResult res;
  res.standardized = standardized;
  double trace = 0;
  for (int t = 0; t < kTraitCount; ++t) trace += std::max(d[t], 0.0);
  for (int pc = 0; pc < 2; ++pc) {
    int col = order[pc];
    int largest = 0;
    for (int t = 1; t < kTraitCount; ++t) {
      if (std::abs(v[t][col]) > std::abs(v[largest][col])) largest = t;
    }
    double sign = v[largest][col] < 0 ? -1.0 : 1.0;
    for (int t = 0; t < kTraitCount; ++t) {
      res.loadings[t][pc] = sign * v[t][col];
    }
    res.variance_explained[pc] =
        trace > 0 ? std::max(d[col], 0.0) / trace : 0.0;
  }
  res.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int pc = 0; pc < 2; ++pc) {
      double s = 0;
      for (int t = 0; t < kTraitCount; ++t) {
        s += x[i][t] * res.loadings[t][pc];
      }
      res.scores[i][pc] = s;
    }
  }
  return res;
}

std::string pca_loadings_csv(const PcaResult& p) {
  std::string out = "trait,PC1,PC2\n";
  char buf[64];
  for (int t = 0; t < kTraitCount; ++t) {
    std::snprintf(buf, sizeof(buf), "%c,%.9f,%.9f",
                  trait_letter(static_cast<TraitDim>(t)), p.loadings[t][0],
                  p.loadings[t][1]);
    out += buf;
    out += "\n";
  }
  return out;
}

std::string pca_scores_csv(const PcaResult& p, const TraitMatrix& traits) {
  std::string out = "model,PC1,PC2\n";
  char buf[160];
  for (std::size_t i = 0; i < p.scores.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s,%.9f,%.9f",
                  traits.models[i].c_str(), p.scores[i][0], p.scores[i][1]);
    out += buf;
    out += "\n";
  }
  return out;
}

}  // namespace traitlab

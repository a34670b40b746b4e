#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "psychometrics.hpp"

namespace traitlab {

struct TraitMatrix {
  std::vector<std::string> models;
  std::vector<std::array<double, kTraitCount>> values;  // O,C,E,A,N

  static TraitMatrix load_csv(const std::string& path);
  void drop_row(const std::string& model);
  std::size_t rows() const { return models.size(); }
};

struct PerformanceTable {
  std::vector<std::string> models;
  std::vector<std::string> domains;
  std::vector<std::vector<double>> acc;  // rows x domains, in [0,1]

  static PerformanceTable load_csv(const std::string& path);
  void drop_row(const std::string& model);
  int domain_index(const std::string& name) const;  // -1 when absent
  std::size_t rows() const { return models.size(); }
};

struct CorrelationResult {
  double r = 0;
  std::size_t n = 0;
};

CorrelationResult pearson(const std::vector<double>& x,
                          const std::vector<double>& y);

std::array<CorrelationResult, kTraitCount> single_trait_correlations(
    const TraitMatrix& traits, const PerformanceTable& perf,
    const std::string& domain);

// Full traits x domains grid plus the joined row count.
struct CorrelationMatrix {
  std::vector<std::string> domains;
  std::array<std::vector<double>, kTraitCount> r;  // [trait][domain]
  std::size_t n = 0;
};

CorrelationMatrix correlation_matrix(const TraitMatrix& traits,
                                     const PerformanceTable& perf);
std::string correlation_matrix_csv(const CorrelationMatrix& m);

struct OlsFit {
  double beta0 = 0;
  double beta_j = 0;
  double beta_k = 0;
  TraitDim j{};
  TraitDim k{};
  double rss = 0;
  double combo_rho = 0;  // corr of beta_j*Tj + beta_k*Tk with P
  std::size_t n = 0;
};

OlsFit paired_trait_ols(const TraitMatrix& traits,
                        const PerformanceTable& perf,
                        const std::string& domain, TraitDim j, TraitDim k);

// Every unordered trait pair against one domain, as JSON-lines.
std::vector<OlsFit> paired_trait_sweep(const TraitMatrix& traits,
                                       const PerformanceTable& perf,
                                       const std::string& domain);
std::string ols_fit_json(const OlsFit& fit, const std::string& domain);

struct PcaResult {
  std::array<std::array<double, 2>, kTraitCount> loadings;  // [trait][pc]
  std::vector<std::array<double, 2>> scores;                // per row
  std::array<double, 2> variance_explained;
  bool standardized = false;
};

// Top-2 principal components of the trait matrix. Centered covariance by
// default; standardized switches to the correlation matrix. Sign: the
// largest-magnitude loading in each component is positive.
PcaResult pca_2d(const TraitMatrix& traits, bool standardized);

std::string pca_loadings_csv(const PcaResult& p);
std::string pca_scores_csv(const PcaResult& p, const TraitMatrix& traits);

}  // namespace traitlab

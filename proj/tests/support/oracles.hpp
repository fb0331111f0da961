// Copyright 2026 The QMS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library code paths they check.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace qms::testing {

inline std::vector<std::string> split_spaces(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline double oracle_accuracy(const std::vector<std::string>& c, const std::vector<std::string>& r) {
  if (c.empty() && r.empty()) return 1.0;
  int hits = 0;
  for (std::size_t i = 0; i < c.size() && i < r.size(); ++i) hits += c[i] == r[i] ? 1 : 0;
  return hits / static_cast<double>(c.size() > r.size() ? c.size() : r.size());
}

struct OracleRouge {
  double precision, recall, f1;
};

// Clipped overlap by greedy one-to-one matching of n-gram occurrences.
inline OracleRouge oracle_rouge(const std::vector<std::string>& c, const std::vector<std::string>& r,
                                int n) {
  if (c == r) return {1.0, 1.0, 1.0};
  auto grams = [n](const std::vector<std::string>& t) {
    std::vector<std::vector<std::string>> g;
    for (int i = 0; i + n <= static_cast<int>(t.size()); ++i) g.emplace_back(t.begin() + i, t.begin() + i + n);
    return g;
  };
  const auto cg = grams(c);
  const auto rg = grams(r);
  if (cg.empty() || rg.empty()) return {0.0, 0.0, 0.0};
  std::vector<bool> used(rg.size(), false);
  int overlap = 0;
  for (const auto& g : cg) {
    for (std::size_t j = 0; j < rg.size(); ++j) {
      if (!used[j] && rg[j] == g) {
        used[j] = true;
        ++overlap;
        break;
      }
    }
  }
  const double p = overlap / static_cast<double>(cg.size());
  const double rc = overlap / static_cast<double>(rg.size());
  return {p, rc, p + rc == 0 ? 0.0 : 2 * p * rc / (p + rc)};
}

// Geometric-mean form of perplexity from explicit probabilities.
inline double oracle_perplexity(const std::vector<double>& probabilities) {
  double product = 1.0;
  for (double p : probabilities) product *= p;
  return std::pow(1.0 / product, 1.0 / static_cast<double>(probabilities.size()));
}

// p = exp(z_k) / sum exp(z), computed without the library's softmax.
inline double oracle_probability(const Eigen::VectorXd& logits, int k) {
  double denom = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) denom += std::exp(logits(i));
  return std::exp(logits(k)) / denom;
}

// Log-bilinear loss with plain loops over raw parameters:
//   L = sum_t -log softmax(E h_t + b)[target_t],  h_t = sum_j C_j x_{slot j}
// `prompt_rows` are the (possibly perturbed) prompt embedding rows.
inline double oracle_loglinear_loss(const Eigen::MatrixXd& E, const std::vector<Eigen::MatrixXd>& C,
                                    const Eigen::VectorXd& b, int bos,
                                    const std::vector<std::vector<double>>& prompt_rows,
                                    const std::vector<int>& target) {
  const int m = static_cast<int>(C.size());
  const int d = static_cast<int>(E.cols());
  const int V = static_cast<int>(E.rows());
  const int P = static_cast<int>(prompt_rows.size());
  double loss = 0.0;
  for (int t = 0; t < static_cast<int>(target.size()); ++t) {
    std::vector<double> h(d, 0.0);
    for (int j = 0; j < m; ++j) {
      const int pos = P + t - m + j;
      std::vector<double> x(d);
      for (int k = 0; k < d; ++k) {
        if (pos < 0) x[k] = E(bos, k);
        else if (pos < P) x[k] = prompt_rows[pos][k];
        else x[k] = E(target[pos - P], k);
      }
      for (int r = 0; r < d; ++r)
        for (int k = 0; k < d; ++k) h[r] += C[j](r, k) * x[k];
    }
    std::vector<double> z(V);
    double zmax = -1e300;
    for (int w = 0; w < V; ++w) {
      double s = b(w);
      for (int k = 0; k < d; ++k) s += E(w, k) * h[k];
      z[w] = s;
      zmax = s > zmax ? s : zmax;
    }
    double sum = 0.0;
    for (int w = 0; w < V; ++w) sum += std::exp(z[w] - zmax);
    loss -= z[target[t]] - zmax - std::log(sum);
  }
  return loss;
}

}  // namespace qms::testing

#pragma once

// Sparse LDL^T for symmetric quasi-definite matrices (up-looking, after QDLDL),
// with AMD fill-reducing ordering and static/dynamic pivot regularization.

#include <suitesparse/amd.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "helios/core/error.hpp"

namespace helios::solver {

class QuasiDefiniteLdl {
 public:
  // Ap/Ai: upper triangle (including every diagonal) of an n x n symmetric matrix, CSC.
  void analyze(int n, const std::vector<int>& Ap, const std::vector<int>& Ai) {
    n_ = n;
    const int nnz = Ap[n];
    perm_.assign(n, 0);
    pinv_.assign(n, 0);
    double control[AMD_CONTROL], info[AMD_INFO];
    amd_defaults(control);
    int status = amd_order(n, Ap.data(), Ai.data(), perm_.data(), control, info);
    if (status != AMD_OK && status != AMD_OK_BUT_JUMBLED)
      fail(ErrorCode::numerical_failure, "AMD ordering failed");
    for (int k = 0; k < n; ++k) pinv_[perm_[k]] = k;

    // Permuted upper triangle.
    std::vector<int> count(n + 1, 0);
    for (int j = 0; j < n; ++j)
      for (int p = Ap[j]; p < Ap[j + 1]; ++p) {
        int a = pinv_[Ai[p]], b = pinv_[j];
        count[std::max(a, b)]++;
      }
    Cp_.assign(n + 1, 0);
    for (int j = 0; j < n; ++j) Cp_[j + 1] = Cp_[j] + count[j];
    Ci_.assign(nnz, 0);
    map_.assign(nnz, 0);
    std::vector<int> next(Cp_.begin(), Cp_.end() - 1);
    for (int j = 0; j < n; ++j)
      for (int p = Ap[j]; p < Ap[j + 1]; ++p) {
        int a = pinv_[Ai[p]], b = pinv_[j];
        int col = std::max(a, b), row = std::min(a, b);
        int q = next[col]++;
        Ci_[q] = row;
        map_[p] = q;
      }
    Cx_.assign(nnz, 0.0);

    // Elimination tree and column counts.
    etree_.assign(n, -1);
    Lnz_.assign(n, 0);
    std::vector<int> work(n, -1);
    for (int j = 0; j < n; ++j) {
      work[j] = j;
      for (int p = Cp_[j]; p < Cp_[j + 1]; ++p) {
        int i = Ci_[p];
        while (work[i] != j) {
          if (etree_[i] == -1) etree_[i] = j;
          Lnz_[i]++;
          work[i] = j;
          i = etree_[i];
        }
      }
    }
    Lp_.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) Lp_[i + 1] = Lp_[i] + Lnz_[i];
    Li_.assign(Lp_[n], 0);
    Lx_.assign(Lp_[n], 0.0);
    D_.assign(n, 0.0);
    Dinv_.assign(n, 0.0);
  }

  // Ax in the order of the analyzed pattern. sign[i] = +1/-1 is the expected pivot sign of row i.
  void factor(const std::vector<double>& Ax, const std::vector<int8_t>& sign, double eps, double delta) {
    const int n = n_;
    for (size_t p = 0; p < Ax.size(); ++p) Cx_[map_[p]] = Ax[p];
    std::vector<int> ymark(n, 0), yidx(n), ebuf(n), nextcol(Lp_.begin(), Lp_.end() - 1);
    std::vector<double> yval(n, 0.0);
    regularized_ = 0;
    for (int k = 0; k < n; ++k) {
      D_[k] = 0.0;
      int nnzY = 0;
      for (int p = Cp_[k]; p < Cp_[k + 1]; ++p) {
        int b = Ci_[p];
        if (b == k) {
          D_[k] += Cx_[p];
          continue;
        }
        yval[b] += Cx_[p];
        int nxt = b;
        if (!ymark[nxt]) {
          ymark[nxt] = 1;
          ebuf[0] = nxt;
          int ne = 1;
          nxt = etree_[b];
          while (nxt != -1 && nxt < k) {
            if (ymark[nxt]) break;
            ymark[nxt] = 1;
            ebuf[ne++] = nxt;
            nxt = etree_[nxt];
          }
          while (ne) yidx[nnzY++] = ebuf[--ne];
        }
      }
      for (int i = nnzY - 1; i >= 0; --i) {
        int c = yidx[i];
        int t = nextcol[c];
        double yc = yval[c];
        for (int j = Lp_[c]; j < t; ++j) yval[Li_[j]] -= Lx_[j] * yc;
        Li_[t] = k;
        Lx_[t] = yc * Dinv_[c];
        D_[k] -= yc * Lx_[t];
        nextcol[c]++;
        yval[c] = 0.0;
        ymark[c] = 0;
      }
      double s = sign[perm_[k]];
      if (!(s * D_[k] > eps)) {
        D_[k] = s * delta;
        ++regularized_;
      }
      Dinv_[k] = 1.0 / D_[k];
    }
  }

  void solve(std::vector<double>& b) const {
    const int n = n_;
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = b[perm_[k]];
    for (int i = 0; i < n; ++i) {
      double xi = x[i];
      if (xi != 0.0)
        for (int j = Lp_[i]; j < Lp_[i + 1]; ++j) x[Li_[j]] -= Lx_[j] * xi;
    }
    for (int i = 0; i < n; ++i) x[i] *= Dinv_[i];
    for (int i = n - 1; i >= 0; --i) {
      double xi = x[i];
      for (int j = Lp_[i]; j < Lp_[i + 1]; ++j) xi -= Lx_[j] * x[Li_[j]];
      x[i] = xi;
    }
    for (int k = 0; k < n; ++k) b[perm_[k]] = x[k];
  }

  int regularized_pivots() const { return regularized_; }
  size_t factor_nonzeros() const { return Li_.size(); }

 private:
  int n_ = 0;
  std::vector<int> perm_, pinv_;
  std::vector<int> Cp_, Ci_, map_;
  std::vector<double> Cx_;
  std::vector<int> etree_, Lnz_, Lp_, Li_;
  std::vector<double> Lx_, D_, Dinv_;
  int regularized_ = 0;
};

}  // namespace helios::solver

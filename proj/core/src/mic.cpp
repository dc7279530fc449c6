#include "gofd/mic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gofd {

IncompleteCholesky::IncompleteCholesky(const Matrix& a, double drop_tol, bool modified)
    : drop_tol_(drop_tol), modified_(modified) {
  if (a.rows() != a.cols()) throw std::invalid_argument("incomplete Cholesky needs a square matrix");
  if (!(drop_tol >= 0.0)) throw std::invalid_argument("drop tolerance must be nonnegative");
  if (factorize(a, 0.0)) return;
  double max_diag = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) max_diag = std::max(max_diag, std::abs(a.coeff(j, j)));
  const double shift = 1e-8 * max_diag;
  if (shift > 0.0 && factorize(a, shift)) {
    shift_ = shift;
    return;
  }
  throw FactorizationError("incomplete Cholesky broke down (nonpositive pivot) even after a diagonal shift");
}

bool IncompleteCholesky::factorize(const Matrix& a_in, double shift) {
  Matrix a = a_in;
  a.makeCompressed();
  const auto n = static_cast<std::size_t>(a.cols());

  std::vector<std::vector<int>> rows(n);
  std::vector<std::vector<double>> vals(n);
  // For column k, position of the next entry to be used as a multiplier.
  std::vector<std::size_t> next(n, 0);
  // Linked lists: columns whose next entry lies in row j.
  std::vector<long long> head(n, -1);
  std::vector<long long> link(n, -1);

  std::vector<double> work(n, 0.0);
  std::vector<char> marked(n, 0);
  std::vector<int> pattern;
  std::vector<double> compensation(n, 0.0);

  for (std::size_t j = 0; j < n; ++j) {
    pattern.clear();
    double diag = shift + compensation[j];
    double col_norm = 0.0;
    for (Matrix::InnerIterator it(a, static_cast<Eigen::Index>(j)); it; ++it) {
      const auto i = static_cast<std::size_t>(it.row());
      if (i < j) continue;
      col_norm += std::abs(it.value());
      if (i == j) {
        diag += it.value();
      } else {
        if (!marked[i]) {
          marked[i] = 1;
          pattern.push_back(static_cast<int>(i));
        }
        work[i] += it.value();
      }
    }

    for (long long k = head[j]; k != -1;) {
      const auto kk = static_cast<std::size_t>(k);
      const long long following = link[kk];
      const std::size_t pos = next[kk];
      const double ljk = vals[kk][pos];
      diag -= ljk * ljk;
      for (std::size_t p = pos + 1; p < rows[kk].size(); ++p) {
        const auto i = static_cast<std::size_t>(rows[kk][p]);
        if (!marked[i]) {
          marked[i] = 1;
          pattern.push_back(static_cast<int>(i));
        }
        work[i] -= vals[kk][p] * ljk;
      }
      next[kk] = pos + 1;
      if (next[kk] < rows[kk].size()) {
        const auto r = static_cast<std::size_t>(rows[kk][next[kk]]);
        link[kk] = head[r];
        head[r] = static_cast<long long>(kk);
      }
      k = following;
    }

    if (!(diag > 0.0)) {
      return false;
    }
    const double pivot0 = std::sqrt(diag);
    const double threshold = drop_tol_ * col_norm;
    std::sort(pattern.begin(), pattern.end());
    std::vector<int> keep_rows;
    std::vector<double> keep_vals;
    for (int i : pattern) {
      const auto ii = static_cast<std::size_t>(i);
      const double c = work[ii];
      work[ii] = 0.0;
      marked[ii] = 0;
      if (c == 0.0) continue;
      if (std::abs(c / pivot0) >= threshold) {
        keep_rows.push_back(i);
        keep_vals.push_back(c);
      } else if (modified_) {
        diag += c;
        compensation[ii] += c;
      }
    }
    if (!(diag > 0.0)) return false;
    const double pivot = std::sqrt(diag);

    rows[j].reserve(keep_rows.size() + 1);
    vals[j].reserve(keep_rows.size() + 1);
    rows[j].push_back(static_cast<int>(j));
    vals[j].push_back(pivot);
    for (std::size_t p = 0; p < keep_rows.size(); ++p) {
      rows[j].push_back(keep_rows[p]);
      vals[j].push_back(keep_vals[p] / pivot);
    }
    next[j] = 1;
    if (rows[j].size() > 1) {
      const auto r = static_cast<std::size_t>(rows[j][1]);
      link[j] = head[r];
      head[r] = static_cast<long long>(j);
    }
  }

  std::vector<Eigen::Triplet<double>> entries;
  std::size_t nnz = 0;
  for (const auto& r : rows) nnz += r.size();
  entries.reserve(nnz);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t p = 0; p < rows[j].size(); ++p) {
      entries.emplace_back(rows[j][p], static_cast<int>(j), vals[j][p]);
    }
  }
  lower_ = Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  lower_.setFromTriplets(entries.begin(), entries.end());
  lower_.makeCompressed();
  return true;
}

void IncompleteCholesky::solve_in_place(std::span<double> x) const {
  if (x.size() != size()) throw std::invalid_argument("incomplete Cholesky solve: size mismatch");
  const auto n = static_cast<Eigen::Index>(x.size());
  const int* outer = lower_.outerIndexPtr();
  const int* inner = lower_.innerIndexPtr();
  const double* value = lower_.valuePtr();
  // Forward: L y = x, column oriented; the diagonal is the first entry of each column.
  for (Eigen::Index j = 0; j < n; ++j) {
    const double yj = x[static_cast<std::size_t>(j)] / value[outer[j]];
    x[static_cast<std::size_t>(j)] = yj;
    for (int p = outer[j] + 1; p < outer[j + 1]; ++p) x[static_cast<std::size_t>(inner[p])] -= value[p] * yj;
  }
  // Backward: L^T z = y, row oriented over the columns of L.
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    double acc = x[static_cast<std::size_t>(j)];
    for (int p = outer[j] + 1; p < outer[j + 1]; ++p) acc -= value[p] * x[static_cast<std::size_t>(inner[p])];
    x[static_cast<std::size_t>(j)] = acc / value[outer[j]];
  }
}

}  // namespace gofd

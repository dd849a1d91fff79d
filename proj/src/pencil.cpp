#include "samp/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace samp {

SvdFactors SvdFactors::truncated(Index r) const {
  require(r >= 1 && r <= sigma.size(), "truncation rank out of range");
  return SvdFactors{u.leftCols(r), sigma.head(r), v.leftCols(r), r};
}

Index default_pencil_parameter(Index n) {
  require(n >= 4, "signal too short for a pencil (need N >= 4)");
  return static_cast<Index>(std::lround(static_cast<double>(n) / 3.0));
}

HankelPair build_hankel(const TimeSeries& y, Index l) {
  const Index n = y.size();
  require(l >= 1 && l <= n - 1, "pencil parameter must satisfy 1 <= L <= N-1");
  const Index rows = n - l;
  HankelPair pair;
  pair.pencil_parameter = l;
  pair.full.resize(rows, l + 1);
  for (Index j = 0; j <= l; ++j) pair.full.col(j) = y.samples.segment(j, rows);
  pair.y0 = pair.full.leftCols(l);
  pair.y1 = pair.full.rightCols(l);
  return pair;
}

SvdFactors svd_y0(const HankelPair& pair, std::optional<Index> rank) {
  const Index full_rank = std::min(pair.y0.rows(), pair.y0.cols());
  if (rank) require(*rank >= 1 && *rank <= full_rank, "SVD rank must satisfy 1 <= r <= min(N-L, L)");

  Eigen::BDCSVD<CMatrix> svd(pair.y0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD of Y0 did not converge");

  SvdFactors out{svd.matrixU(), svd.singularValues(), svd.matrixV(), full_rank};
  // Eigen already returns descending values; a stable sort keeps that
  // contract explicit for ties.
  std::vector<Index> order(static_cast<std::size_t>(full_rank));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return out.sigma[a] > out.sigma[b]; });
  if (!std::is_sorted(order.begin(), order.end())) {
    SvdFactors sorted = out;
    for (Index k = 0; k < full_rank; ++k) {
      sorted.u.col(k) = out.u.col(order[k]);
      sorted.v.col(k) = out.v.col(order[k]);
      sorted.sigma[k] = out.sigma[order[k]];
    }
    out = std::move(sorted);
  }
  return rank ? out.truncated(*rank) : out;
}

PencilDecomposition assemble_modes(const SvdFactors& svd, const CMatrix& reduced, const CMatrix& eig_vectors,
                                   const CVector& eigenvalues) {
  const Index r = eig_vectors.cols();
  require(svd.rank == r && reduced.rows() == r && eigenvalues.size() == r, "mode assembly size mismatch");

  PencilDecomposition d;
  d.rank = r;
  d.reduced = reduced;
  d.eig_vectors = eig_vectors;
  d.eigenvalues = eigenvalues;

  Eigen::PartialPivLU<CMatrix> lu(eig_vectors);
  d.eig_vectors_rcond = lu.rcond();
  if (!std::isfinite(d.eig_vectors_rcond)) d.eig_vectors_rcond = 0.0;
  d.eig_vectors_inv = lu.solve(CMatrix::Identity(r, r));

  d.left_modes = svd.u * svd.sigma.asDiagonal() * eig_vectors;
  d.right_modes = d.eig_vectors_inv * svd.v.adjoint();
  return d;
}

PencilDecomposition decompose(const HankelPair& pair, const SvdFactors& svd, Index rank) {
  require(rank >= 1 && rank <= svd.rank, "decomposition rank exceeds available singular triplets");
  const SvdFactors t = svd.rank == rank ? svd : svd.truncated(rank);
  for (Index k = 0; k < rank; ++k)
    require(t.sigma[k] > 0.0 && std::isfinite(t.sigma[k]), "zero singular value inside truncation rank");

  const CMatrix reduced = t.sigma.cwiseInverse().asDiagonal() * (t.u.adjoint() * pair.y1 * t.v);

  Eigen::ComplexEigenSolver<CMatrix> solver(reduced, true);
  if (solver.info() != Eigen::Success) throw NumericalError("eigen-decomposition of the reduced pencil failed");

  const CVector& lambda = solver.eigenvalues();
  std::vector<Index> order(static_cast<std::size_t>(rank));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(lambda[a]) > std::abs(lambda[b]); });

  CMatrix q(rank, rank);
  CVector sorted(rank);
  for (Index k = 0; k < rank; ++k) {
    q.col(k) = solver.eigenvectors().col(order[k]);
    sorted[k] = lambda[order[k]];
  }
  return assemble_modes(t, reduced, q, sorted);
}

PencilDecomposition decompose(const HankelPair& pair, Index rank) {
  const Index full_rank = std::min(pair.y0.rows(), pair.y0.cols());
  require(rank >= 1 && rank <= full_rank, "decomposition rank must satisfy 1 <= r <= min(N-L, L)");
  return decompose(pair, svd_y0(pair), rank);
}

}  // namespace samp

#include "samp/perturbation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "samp/detect.hpp"

namespace samp {
namespace {

Index nearest_index(const CVector& values, Complex target) {
  Index best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < values.size(); ++k) {
    const double d = std::abs(values[k] - target);
    if (d < best_dist) {
      best_dist = d;
      best = k;
    }
  }
  return best;
}

double spectral_radius(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<CMatrix> solver(m, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalues for the spectral radius did not converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

CMatrix inverse_checked(const CMatrix& m, const char* what) {
  Eigen::PartialPivLU<CMatrix> lu(m);
  if (!(lu.rcond() > 1e-14)) throw NumericalError(std::string(what) + " is numerically singular");
  return lu.solve(CMatrix::Identity(m.rows(), m.cols()));
}

void check_noise_length(const NoiselessFactors& f, const TimeSeries& noise) {
  require(noise.size() == f.mode_length() + f.pencil_parameter(), "noise length must equal N");
}

}  // namespace

NoiselessFactors noiseless_factors(const SignalSpec& spec, Index l) {
  spec.validate();
  const Index n = spec.sample_count;
  const Index m = spec.order();
  require(l >= m && l <= n - m, "pencil parameter must satisfy M <= L <= N-M");

  NoiselessFactors f;
  f.poles = spec.poles();
  f.amplitudes = spec.amplitudes();
  f.z_left.resize(n - l, m);
  f.z_right.resize(m, l);
  for (Index k = 0; k < m; ++k) {
    f.z_left.col(k) = test_vector(f.poles[k], n - l);
    f.z_right.row(k) = test_vector(f.poles[k], l).transpose();
  }

  const CMatrix gram_left = f.z_left.adjoint() * f.z_left;
  const CMatrix gram_right = f.z_right * f.z_right.adjoint();
  Eigen::JacobiSVD<CMatrix> sv(f.z_right);
  const RVector& s = sv.singularValues();
  f.gram_condition = s[m - 1] > 0.0 ? (s[0] / s[m - 1]) * (s[0] / s[m - 1]) : std::numeric_limits<double>::infinity();

  f.p_rows = gram_left.ldlt().solve(f.z_left.adjoint());
  f.q_cols = f.z_right.adjoint() * gram_right.ldlt().solve(CMatrix::Identity(m, m));
  return f;
}

CVector conv_apply(const CVector& q, const CVector& w) {
  const Index l = q.size();
  const Index n = w.size();
  require(l >= 1 && l <= n, "kernel longer than the signal");
  CVector out(n - l + 1);
  for (Index r = 0; r < out.size(); ++r) out[r] = q.transpose() * w.segment(r, l);
  return out;
}

CMatrix conv_matrix(const CVector& q, Index n) {
  const Index l = q.size();
  require(l >= 1 && l <= n, "kernel longer than the signal");
  CMatrix out = CMatrix::Zero(n - l + 1, n);
  for (Index r = 0; r < out.rows(); ++r) out.row(r).segment(r, l) = q.transpose();
  return out;
}

CVector full_convolution(const CVector& u, const CVector& q) {
  require(u.size() >= 1 && q.size() >= 1, "convolution of an empty vector");
  CVector out = CVector::Zero(u.size() + q.size() - 1);
  for (Index a = 0; a < u.size(); ++a)
    for (Index b = 0; b < q.size(); ++b) out[a + b] += u[a] * q[b];
  return out;
}

CVector u_vector(const CVector& p_row, Complex z) {
  const Index k = p_row.size();
  CVector u = CVector::Zero(k + 1);
  u.tail(k) += p_row;
  u.head(k) -= z * p_row;
  return u;
}

PerturbationTerms first_order_noise_column(const NoiselessFactors& f, const TimeSeries& noise, Index i,
                                           Complex perturbed_pole) {
  check_noise_length(f, noise);
  const Index m_count = f.order();
  require(i >= 0 && i < m_count, "component index out of range");
  const Complex b = f.amplitudes[i];
  require(b != Complex(0.0, 0.0), "component amplitude must be nonzero");

  const CVector qw = conv_apply(f.q_cols.col(i), noise.samples);
  const Index len = f.mode_length();

  PerturbationTerms t;
  t.xi = qw.head(len) / b;
  t.gammas.resize(m_count - 1);
  t.e_left_col = t.xi;
  Index slot = 0;
  for (Index m = 0; m < m_count; ++m) {
    if (m == i) continue;
    const Complex gap = perturbed_pole - f.poles[m];
    if (std::abs(gap) < 1e-12) throw InvalidArgument("perturbed pole coincides with another signal pole");
    CVector u = u_vector(f.p_rows.row(m).transpose(), f.poles[i]);
    const Complex gamma = (u.transpose() * qw).value() / (gap * b);
    t.gammas[slot++] = gamma;
    t.e_left_col += gamma * f.z_left.col(m);
    t.u_vectors.push_back(std::move(u));
  }
  return t;
}

CVector hankel_form_noise_column(const NoiselessFactors& f, const TimeSeries& noise, Index i, Complex perturbed_pole) {
  check_noise_length(f, noise);
  require(i >= 0 && i < f.order(), "component index out of range");
  const HankelPair w = build_hankel(noise, f.pencil_parameter());
  const Complex b = f.amplitudes[i];
  const CVector q = f.q_cols.col(i);
  const CVector shifted = (w.y1 - f.poles[i] * w.y0) * q;

  CVector e = w.y0 * q / b;
  for (Index m = 0; m < f.order(); ++m) {
    if (m == i) continue;
    const Complex gap = perturbed_pole - f.poles[m];
    if (std::abs(gap) < 1e-12) throw InvalidArgument("perturbed pole coincides with another signal pole");
    const Complex coeff = (f.p_rows.row(m) * shifted).value() / (b * gap);
    e += coeff * f.z_left.col(m);
  }
  return e;
}

Complex matched_perturbed_pole(const NoiselessFactors& f, const HankelPair& noisy, Index i) {
  require(i >= 0 && i < f.order(), "component index out of range");
  const PencilDecomposition d = decompose(noisy, f.order());
  return d.eigenvalues[nearest_index(d.eigenvalues, f.poles[i])];
}

double check_spectral_condition(const NoiselessFactors& f, const HankelPair& noisy, Index i) {
  const Index l = f.pencil_parameter();
  const Index m = f.order();
  require(noisy.pencil_parameter == l, "pencil parameter mismatch");
  require(i >= 0 && i < m, "component index out of range");

  // X0^+ X1 = Z_R^+ Z Z_R, so its eigenvectors are the columns of Z_R^+
  // followed by any basis of the null space of Z_R.
  const CMatrix clean = f.q_cols * f.poles.asDiagonal() * f.z_right;
  const SvdFactors svd = svd_y0(noisy, m);
  const CMatrix noisy_product = svd.v * svd.sigma.cwiseInverse().asDiagonal() * svd.u.adjoint() * noisy.y1;
  const CMatrix delta = noisy_product - clean;

  CMatrix t_right(l, l);
  t_right.leftCols(m) = f.q_cols;
  if (l > m) {
    Eigen::JacobiSVD<CMatrix> null_svd(f.z_right, Eigen::ComputeFullV);
    t_right.rightCols(l - m) = null_svd.matrixV().rightCols(l - m);
  }
  const CMatrix t_left_h = inverse_checked(t_right, "eigenvector basis of X0^+ X1");

  const Complex z_tilde = matched_perturbed_pole(f, noisy, i);
  CVector d(l);
  for (Index k = 0; k < l; ++k) {
    const Complex lambda_k = k < m ? f.poles[k] : Complex(0.0, 0.0);
    d[k] = k == i ? Complex(0.0, 0.0) : 1.0 / (z_tilde - lambda_k);
  }
  return spectral_radius(d.asDiagonal() * (t_left_h * delta * t_right));
}

NoiseTermBounds noise_term_bounds(const NoiselessFactors& f, double snr_i, double epsilon, Index i) {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(snr_i > 0.0, "component SNR must be positive");
  require(i >= 0 && i < f.order(), "component index out of range");

  NoiseTermBounds out;
  out.xi_bound = std::sqrt(2.0 * std::log(1.0 / epsilon) / snr_i);
  out.gamma_bounds.resize(f.order() - 1);
  const CVector q = f.q_cols.col(i);
  Index slot = 0;
  for (Index m = 0; m < f.order(); ++m) {
    if (m == i) continue;
    const CVector u = u_vector(f.p_rows.row(m).transpose(), f.poles[i]);
    out.gamma_bounds[slot++] = 2.0 * out.xi_bound * full_convolution(u, q).norm() / std::abs(f.poles[i] - f.poles[m]);
  }
  return out;
}

Eigensystem eigensystem(const CMatrix& a) {
  require(a.rows() == a.cols() && a.rows() > 0, "eigensystem needs a non-empty square matrix");
  Eigen::ComplexEigenSolver<CMatrix> solver(a, true);
  if (solver.info() != Eigen::Success) throw NumericalError("eigen-decomposition did not converge");
  Eigensystem e{solver.eigenvalues(), solver.eigenvectors(), CMatrix()};
  e.left_h = inverse_checked(e.right, "eigenvector matrix");
  return e;
}

EigvecApprox perturbed_eigvec_approx(const Eigensystem& base, const CMatrix& delta, Index i) {
  const Index n = base.values.size();
  require(delta.rows() == n && delta.cols() == n, "perturbation size mismatch");
  require(i >= 0 && i < n, "eigen index out of range");

  EigvecApprox out;
  const CMatrix perturbed = base.right * base.values.asDiagonal() * base.left_h + delta;
  Eigen::ComplexEigenSolver<CMatrix> solver(perturbed, false);
  if (solver.info() != Eigen::Success) throw NumericalError("perturbed eigenvalues did not converge");
  out.perturbed_value = solver.eigenvalues()[nearest_index(solver.eigenvalues(), base.values[i])];

  CVector d(n);
  for (Index k = 0; k < n; ++k) {
    if (k == i) {
      d[k] = 0.0;
      continue;
    }
    const Complex gap = out.perturbed_value - base.values[k];
    if (std::abs(gap) < 1e-14) throw NumericalError("eigenvalue i is not simple");
    d[k] = 1.0 / gap;  // u_k^H v_k = 1 by construction of left_h
  }
  const CMatrix projected = base.left_h * delta * base.right;
  out.spectral_radius = spectral_radius(d.asDiagonal() * projected);
  const CVector coeffs = d.asDiagonal() * projected.col(i);
  out.vector = base.right.col(i) + base.right * coeffs;
  return out;
}

CVector exact_perturbed_eigvec(const Eigensystem& base, const CMatrix& delta, Index i) {
  const Index n = base.values.size();
  require(delta.rows() == n && delta.cols() == n, "perturbation size mismatch");
  require(i >= 0 && i < n, "eigen index out of range");
  const CMatrix perturbed = base.right * base.values.asDiagonal() * base.left_h + delta;
  Eigen::ComplexEigenSolver<CMatrix> solver(perturbed, true);
  if (solver.info() != Eigen::Success) throw NumericalError("perturbed eigen-decomposition did not converge");
  const CVector v = solver.eigenvectors().col(nearest_index(solver.eigenvalues(), base.values[i]));
  const Complex scale = (base.left_h.row(i) * v).value();
  if (std::abs(scale) < 1e-300) throw NumericalError("perturbed eigenvector is orthogonal to u_i");
  return v / scale;
}

double local_ratio_feature(const CVector& mode, Complex eigenvalue) {
  Complex sum(0.0, 0.0);
  Index used = 0;
  for (Index k = 0; k + 1 < mode.size(); ++k) {
    if (mode[k] == Complex(0.0, 0.0)) continue;
    sum += mode[k + 1] / mode[k];
    ++used;
  }
  if (used == 0) throw InvalidArgument("no usable consecutive ratios in the mode");
  return std::abs(eigenvalue - sum / static_cast<double>(used));
}

}  // namespace samp

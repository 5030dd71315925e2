#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <cmath>
#include <complex>
#include <vector>

#include "gcoh/core.hpp"
#include "gcoh/errors.hpp"

// Independent truncated-operator reconstruction of Gaussian states in the
// Fock basis. The state is decomposed as thermal modes -> passive rotation ->
// single-mode squeezers -> passive rotation -> displacement, and each factor
// is applied as the exponential of its truncated generator. This path shares
// no code with the amplitude recursion in fock.hpp and serves as its oracle.

namespace gcoh {
namespace fockops {

using Complex = std::complex<double>;
using SparseC = Eigen::SparseMatrix<Complex>;

/// Truncated annihilation operator, (K+1)x(K+1).
inline Eigen::MatrixXd annihilation(int cutoff) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

/// exp(G) for anti-Hermitian G, via the spectral decomposition of iG.
inline Eigen::MatrixXcd exp_antihermitian(const Eigen::MatrixXcd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Complex(0, 1) * g);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex(0, -es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Single-mode squeezer exp(r (a^2 - a^dag^2)/2); Heisenberg action diag(e^-r, e^r).
inline Eigen::MatrixXcd squeezer(int cutoff, double r) {
  const Eigen::MatrixXd a = annihilation(cutoff);
  const Eigen::MatrixXd g = 0.5 * r * (a * a - (a * a).transpose());
  return exp_antihermitian(g.cast<Complex>());
}

/// Displacement exp(alpha a^dag - conj(alpha) a).
inline Eigen::MatrixXcd displacement(int cutoff, Complex alpha) {
  const Eigen::MatrixXcd a = annihilation(cutoff).cast<Complex>();
  const Eigen::MatrixXcd g = alpha * a.adjoint() - std::conj(alpha) * a;
  return exp_antihermitian(g);
}

/// Two-mode squeezer exp(r (a1 a2 - a1^dag a2^dag)) on the truncated box,
/// exponentiated exactly on each n1-n2 = const sector.
inline SparseC two_mode_squeezer(int cut1, int cut2, double r) {
  const int d1 = cut1 + 1, d2 = cut2 + 1;
  const int dim = d1 * d2;
  auto idx = [d2](int n1, int n2) { return n1 * d2 + n2; };
  std::vector<Eigen::Triplet<Complex>> trips;
  for (int diff = -cut2; diff <= cut1; ++diff) {
    std::vector<std::pair<int, int>> basis;  // states with n1-n2 = diff
    for (int n1 = std::max(diff, 0); n1 <= cut1; ++n1) {
      const int n2 = n1 - diff;
      if (n2 > cut2) break;
      basis.emplace_back(n1, n2);
    }
    const int m = static_cast<int>(basis.size());
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) {
      // a1 a2 maps basis[i+1] -> basis[i]
      const auto [n1, n2] = basis[i + 1];
      const double amp = std::sqrt(static_cast<double>(n1) * n2);
      g(i, i + 1) += r * amp;
      g(i + 1, i) -= r * amp;
    }
    const Eigen::MatrixXcd u = exp_antihermitian(g);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (std::abs(u(i, j)) > 1e-300)
          trips.emplace_back(idx(basis[i].first, basis[i].second),
                             idx(basis[j].first, basis[j].second), u(i, j));
  }
  SparseC u(dim, dim);
  u.setFromTriplets(trips.begin(), trips.end());
  return u;
}

/// Passive unitary exp(i sum_jk h_jk a^dag_j a_k) on one or two modes,
/// exponentiated per total-photon-number shell (h Hermitian).
inline SparseC passive_unitary(const Eigen::MatrixXcd& h, int cut1, int cut2 = -1) {
  if (h.rows() == 1) {
    const int d = cut1 + 1;
    SparseC u(d, d);
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int n = 0; n <= cut1; ++n)
      trips.emplace_back(n, n, std::exp(Complex(0, h(0, 0).real() * n)));
    u.setFromTriplets(trips.begin(), trips.end());
    return u;
  }
  const int d2 = cut2 + 1;
  const int dim = (cut1 + 1) * d2;
  auto idx = [d2](int n1, int n2) { return n1 * d2 + n2; };
  std::vector<Eigen::Triplet<Complex>> trips;
  for (int s = 0; s <= cut1 + cut2; ++s) {
    std::vector<std::pair<int, int>> basis;
    for (int n1 = std::max(s - cut2, 0); n1 <= std::min(s, cut1); ++n1)
      basis.emplace_back(n1, s - n1);
    const int m = static_cast<int>(basis.size());
    Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      const auto [n1, n2] = basis[i];
      block(i, i) = h(0, 0) * static_cast<double>(n1) + h(1, 1) * static_cast<double>(n2);
      // a^dag_0 a_1 : (n1, n2) -> (n1+1, n2-1)
      if (n2 >= 1 && n1 + 1 <= cut1) {
        const double amp = std::sqrt(static_cast<double>(n1 + 1) * n2);
        block(i + 1, i) += h(0, 1) * amp;  // basis is ordered by ascending n1
        block(i, i + 1) += h(1, 0) * amp;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(block);
    Eigen::VectorXcd phases(m);
    for (int i = 0; i < m; ++i) phases(i) = std::exp(Complex(0, es.eigenvalues()(i)));
    const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() *
                               es.eigenvectors().adjoint();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        trips.emplace_back(idx(basis[i].first, basis[i].second),
                           idx(basis[j].first, basis[j].second), u(i, j));
  }
  SparseC u(dim, dim);
  u.setFromTriplets(trips.begin(), trips.end());
  return u;
}

/// Embed a single-mode operator into the two-mode product space.
inline SparseC embed_local(const Eigen::MatrixXcd& u, int mode, int cut1, int cut2) {
  const int d1 = cut1 + 1, d2 = cut2 + 1;
  std::vector<Eigen::Triplet<Complex>> trips;
  if (mode == 0) {
    for (int a = 0; a < d1; ++a)
      for (int b = 0; b < d1; ++b) {
        if (std::abs(u(a, b)) < 1e-300) continue;
        for (int i = 0; i < d2; ++i) trips.emplace_back(a * d2 + i, b * d2 + i, u(a, b));
      }
  } else {
    for (int a = 0; a < d2; ++a)
      for (int b = 0; b < d2; ++b) {
        if (std::abs(u(a, b)) < 1e-300) continue;
        for (int i = 0; i < d1; ++i) trips.emplace_back(i * d2 + a, i * d2 + b, u(a, b));
      }
  }
  SparseC e(d1 * d2, d1 * d2);
  e.setFromTriplets(trips.begin(), trips.end());
  return e;
}

struct Williamson {
  Eigen::VectorXd nu;  // symplectic eigenvalues, one per mode
  Eigen::MatrixXd s;   // symplectic with sigma = s * diag(nu each twice) * s^T
};

inline Williamson williamson(const Eigen::MatrixXd& sigma) {
  const int dim = static_cast<int>(sigma.rows());
  const int n = dim / 2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.eigenvalues()(0) <= 0)
    throw validity_error("williamson: covariance matrix not positive definite");
  const Eigen::MatrixXd root = es.eigenvectors() *
                               es.eigenvalues().cwiseSqrt().asDiagonal() *
                               es.eigenvectors().transpose();
  Eigen::MatrixXd m = root * symplectic_form(n) * root;
  m = 0.5 * (m - m.transpose()).eval();
  Eigen::RealSchur<Eigen::MatrixXd> schur(m);
  Eigen::MatrixXd q = schur.matrixU();
  const Eigen::MatrixXd& t = schur.matrixT();
  Williamson w;
  w.nu.resize(n);
  Eigen::VectorXd inv_sqrt(dim);
  for (int i = 0; i < n; ++i) {
    double val = t(2 * i, 2 * i + 1);
    if (val < 0) {
      q.col(2 * i + 1) *= -1.0;
      val = -val;
    }
    w.nu(i) = val;
    inv_sqrt(2 * i) = inv_sqrt(2 * i + 1) = 1.0 / std::sqrt(val);
  }
  w.s = root * q * inv_sqrt.asDiagonal();
  return w;
}

struct BlochMessiah {
  Eigen::MatrixXd o1, o2;  // orthogonal symplectic
  Eigen::VectorXd z;       // x-axis scalings, one per mode; S = o1 * Z * o2
};

/// Euler-type decomposition S = O1 Z O2 with O1, O2 orthogonal symplectic and
/// Z = diag(z1, 1/z1, ...). Built from the polar decomposition S = P U and the
/// symplectic eigenstructure of P (eigenpairs (lambda, v) and (1/lambda, Omega v)).
inline BlochMessiah bloch_messiah(const Eigen::MatrixXd& s) {
  const int dim = static_cast<int>(s.rows());
  const int n = dim / 2;
  const Eigen::MatrixXd omega = symplectic_form(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s * s.transpose());
  const Eigen::MatrixXd p_root = es.eigenvectors() *
                                 es.eigenvalues().cwiseSqrt().asDiagonal() *
                                 es.eigenvectors().transpose();
  const Eigen::MatrixXd u = p_root.llt().solve(s);  // orthogonal symplectic remainder

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(p_root);
  BlochMessiah bm;
  bm.z.resize(n);
  Eigen::MatrixXd o1(dim, dim);
  std::vector<Eigen::VectorXd> chosen;
  int filled = 0;
  for (int i = dim - 1; i >= 0 && filled < n; --i) {  // descending eigenvalues
    Eigen::VectorXd v = ep.eigenvectors().col(i);
    for (const auto& c : chosen) v -= c.dot(v) * c;
    const double norm = v.norm();
    if (norm < 0.5) continue;  // candidate already spanned (degenerate lambda = 1 pair)
    v /= norm;
    const Eigen::VectorXd w = -omega * v;
    o1.col(2 * filled) = v;
    o1.col(2 * filled + 1) = w;
    bm.z(filled) = ep.eigenvalues()(i);
    chosen.push_back(v);
    chosen.push_back(w);
    ++filled;
  }
  if (filled != n) throw convergence_error("bloch_messiah: failed to pair eigenvectors");
  bm.o1 = o1;
  bm.o2 = o1.transpose() * u;
  Eigen::VectorXd zdiag(dim);
  for (int i = 0; i < n; ++i) {
    zdiag(2 * i) = bm.z(i);
    zdiag(2 * i + 1) = 1.0 / bm.z(i);
  }
  const double resid = (bm.o1 * zdiag.asDiagonal() * bm.o2 - s).cwiseAbs().maxCoeff();
  if (resid > 1e-8 * std::max(1.0, s.cwiseAbs().maxCoeff()))
    throw convergence_error("bloch_messiah: decomposition residual too large");
  return bm;
}

/// Complex n x n unitary equivalent of an orthogonal symplectic matrix.
inline Eigen::MatrixXcd passive_to_unitary(const Eigen::MatrixXd& o) {
  const int n = static_cast<int>(o.rows()) / 2;
  Eigen::MatrixXcd u(n, n);
  double resid = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      u(j, k) = Complex(o(2 * j, 2 * k), o(2 * j + 1, 2 * k));
      resid = std::max(resid, std::abs(o(2 * j, 2 * k + 1) + o(2 * j + 1, 2 * k)));
      resid = std::max(resid, std::abs(o(2 * j + 1, 2 * k + 1) - o(2 * j, 2 * k)));
    }
  if (resid > 1e-8)
    throw convergence_error("passive_to_unitary: input is not orthogonal symplectic");
  return u;
}

/// Hermitian logarithm h = -i log(u) of a unitary matrix (Schur based).
inline Eigen::MatrixXcd unitary_log(const Eigen::MatrixXcd& u) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  const Eigen::MatrixXcd& q = schur.matrixU();
  Eigen::VectorXcd phases(u.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    phases(i) = std::arg(schur.matrixT()(i, i));
  Eigen::MatrixXcd h = q * phases.asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

}  // namespace fockops

/// Density matrix of a 1- or 2-mode Gaussian state in the truncated Fock
/// basis (two-mode index flattening: |n1, n2> -> n1*(cutoff+1)+n2), built by
/// applying truncated generator exponentials to a thermal diagonal.
inline Eigen::MatrixXcd fock_oracle_density_matrix(const GaussianState& state,
                                                   int cutoff) {
  namespace fo = fockops;
  const int n = state.n_modes();
  if (n < 1 || n > 2)
    throw unsupported_error("fock_oracle_density_matrix: supports 1 or 2 modes");
  const double nbar_max = mean_photon_numbers(state).maxCoeff();
  if (cutoff < 10.0 * (1.0 + nbar_max))
    throw unsupported_error(
        "fock_oracle_density_matrix: cutoff below 10*(1 + max mean photon number)");

  const fo::Williamson w = fo::williamson(state.cov());
  const fo::BlochMessiah bm = fo::bloch_messiah(w.s);

  const int d = cutoff + 1;
  const int dim = (n == 1) ? d : d * d;

  // Thermal diagonal at the Williamson occupancies.
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(1);
  for (int mode = 0; mode < n; ++mode) {
    const double q = (w.nu(mode) - 1.0) / (w.nu(mode) + 1.0);
    Eigen::VectorXd g(d);
    double weight = 1.0 - q;
    for (int k = 0; k < d; ++k) {
      g(k) = weight;
      weight *= q;
    }
    Eigen::VectorXd next(diag.size() * d);
    for (Eigen::Index i = 0; i < diag.size(); ++i)
      next.segment(i * d, d) = diag(i) * g;
    diag = next;
  }
  Eigen::MatrixXcd rho = diag.cast<fo::Complex>().asDiagonal();

  auto apply = [&rho](const fo::SparseC& u) {
    Eigen::MatrixXcd tmp = u * rho;
    rho = tmp * u.adjoint();
  };

  // Passive O2, squeezers, passive O1, then displacement.
  const Eigen::MatrixXcd h2 = fo::unitary_log(fo::passive_to_unitary(bm.o2));
  apply(fo::passive_unitary(h2, cutoff, n == 2 ? cutoff : -1));
  for (int mode = 0; mode < n; ++mode) {
    const double r = -std::log(bm.z(mode));
    if (std::abs(r) < 1e-15) continue;
    const Eigen::MatrixXcd sq = fo::squeezer(cutoff, r);
    apply(n == 1 ? fo::SparseC(sq.sparseView()) : fo::embed_local(sq, mode, cutoff, cutoff));
  }
  const Eigen::MatrixXcd h1 = fo::unitary_log(fo::passive_to_unitary(bm.o1));
  apply(fo::passive_unitary(h1, cutoff, n == 2 ? cutoff : -1));
  for (int mode = 0; mode < n; ++mode) {
    const fo::Complex alpha(state.mean()(2 * mode) / std::sqrt(2.0),
                            state.mean()(2 * mode + 1) / std::sqrt(2.0));
    if (std::abs(alpha) < 1e-15) continue;
    const Eigen::MatrixXcd dd = fo::displacement(cutoff, alpha);
    apply(n == 1 ? fo::SparseC(dd.sparseView()) : fo::embed_local(dd, mode, cutoff, cutoff));
  }

  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double trace = rho.trace().real();
  if (trace < 1.0 - 1e-4)
    throw convergence_error("fock_oracle_density_matrix: insufficient cutoff (trace deficit)");
  (void)dim;
  return rho;
}

/// Diagonal of the oracle density matrix, reshaped per mode count:
/// single mode -> vector of p_n; two modes -> matrix p_{n1,n2}.
inline Eigen::VectorXd fock_oracle_diagonal_1mode(const GaussianState& state, int cutoff) {
  return fock_oracle_density_matrix(state, cutoff).diagonal().real();
}

inline Eigen::MatrixXd fock_oracle_diagonal_2mode(const GaussianState& state, int cutoff) {
  const Eigen::VectorXd diag = fock_oracle_density_matrix(state, cutoff).diagonal().real();
  const int d = cutoff + 1;
  Eigen::MatrixXd p(d, d);
  for (int n1 = 0; n1 < d; ++n1) p.row(n1) = diag.segment(n1 * d, d).transpose();
  return p;
}

}  // namespace gcoh

#include "bdfp/projector_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "bdfp/errors.hpp"

namespace bdfp::proj {
namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::SelfAdjointEigenSolver<Matrix> eigensolve(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw Error(Errc::invalid_parameter, "eigendecomposition failed");
  return es;
}

// Orthonormal basis of Ran P (eigenvectors with eigenvalue near 1).
Matrix range_basis(const ProjectorMatrix& p) {
  const auto es = eigensolve(p.entries);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < p.dim(); ++i)
    if (es.eigenvalues()(i) > 0.5) ++rank;
  Matrix basis(p.dim(), rank);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < p.dim(); ++i)
    if (es.eigenvalues()(i) > 0.5) basis.col(c++) = es.eigenvectors().col(i);
  return basis;
}

}  // namespace

ProjectorMatrix ProjectorMatrix::from(Matrix m) {
  if (m.rows() != m.cols()) throw Error(Errc::not_a_projector, "matrix not square");
  const double scale = std::max(1.0, m.norm());
  if ((m - m.adjoint()).norm() > 1e-12 * scale)
    throw Error(Errc::not_a_projector, "matrix not Hermitian");
  if ((m * m - m).norm() > 1e-12 * scale)
    throw Error(Errc::not_a_projector, "matrix not idempotent");
  return ProjectorMatrix{std::move(m)};
}

AntiunitaryMap AntiunitaryMap::from(Matrix k) {
  const Eigen::Index n = k.rows();
  if (k.cols() != n) throw Error(Errc::invalid_parameter, "conjugation matrix not square");
  if ((k * k.adjoint() - Matrix::Identity(n, n)).norm() > 1e-12 * std::max(1.0, k.norm()))
    throw Error(Errc::invalid_parameter, "conjugation matrix not unitary");
  if ((k * k.conjugate() - Matrix::Identity(n, n)).norm() > 1e-12 * std::max(1.0, k.norm()))
    throw Error(Errc::invalid_parameter, "conjugation is not an involution");
  return AntiunitaryMap{std::move(k)};
}

AntiunitaryMap standard_conjugation(Eigen::Index n_half) {
  if (n_half < 1) throw Error(Errc::invalid_parameter, "n_half must be >= 1");
  const Eigen::Index n = 2 * n_half;
  Matrix k = Matrix::Zero(n, n);
  k.topRightCorner(n_half, n_half) = Matrix::Identity(n_half, n_half);
  k.bottomLeftCorner(n_half, n_half) = Matrix::Identity(n_half, n_half);
  return AntiunitaryMap{std::move(k)};
}

ProjectorMatrix swap_vacuum_projector(Eigen::Index n_half) {
  const Eigen::Index n = 2 * n_half;
  Matrix p = Matrix::Zero(n, n);
  p.bottomRightCorner(n_half, n_half) = Matrix::Identity(n_half, n_half);
  return ProjectorMatrix{std::move(p)};
}

StructureDecomposition decompose_difference(const ProjectorMatrix& p1,
                                            const ProjectorMatrix& p0) {
  if (p1.dim() != p0.dim()) throw Error(Errc::invalid_parameter, "dimension mismatch");
  const Eigen::Index n = p1.dim();
  const Matrix q = p1.entries - p0.entries;
  const auto es = eigensolve(q);
  const double tol = kClusterTol * std::max(1.0, q.norm());

  StructureDecomposition dec;
  dec.dim = n;
  const Matrix complement = Matrix::Identity(n, n) - p0.entries;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam >= 1.0 - tol) {
      dec.plus_vectors.push_back(es.eigenvectors().col(i));
    } else if (lam <= -1.0 + tol) {
      dec.minus_vectors.push_back(es.eigenvectors().col(i));
    } else if (lam > tol) {
      // Positive member of a ±sinθ pair; the plane is recovered from the
      // P0-split of its eigenvector (phases line up with the f₊ convention).
      const Vector f = es.eigenvectors().col(i);
      Vector ep = complement * f;
      Vector em = p0.entries * f;
      const double np = ep.norm(), nm = em.norm();
      if (np < tol || nm < tol)
        throw Error(Errc::not_a_projector, "projector difference has a broken plane");
      PrincipalPlane plane;
      plane.e_plus = ep / np;
      plane.e_minus = em / nm;
      plane.theta = std::asin(std::clamp(lam, 0.0, 1.0));
      dec.planes.push_back(std::move(plane));
    }
  }
  std::sort(dec.planes.begin(), dec.planes.end(),
            [](const PrincipalPlane& a, const PrincipalPlane& b) { return a.theta > b.theta; });
  return dec;
}

Matrix reconstruct(const StructureDecomposition& dec) {
  Matrix q = Matrix::Zero(dec.dim, dec.dim);
  for (const auto& a : dec.plus_vectors) q += a * a.adjoint();
  for (const auto& a : dec.minus_vectors) q -= a * a.adjoint();
  for (const auto& plane : dec.planes) {
    const double s = std::sin(plane.theta);
    const double cp = std::sqrt((1.0 + s) / 2.0);
    const double cm = std::sqrt((1.0 - s) / 2.0);
    const Vector fp = cm * plane.e_minus + cp * plane.e_plus;
    const Vector fm = -cp * plane.e_minus + cm * plane.e_plus;
    q += s * (fp * fp.adjoint() - fm * fm.adjoint());
  }
  return q;
}

Matrix canonical_log(const ProjectorMatrix& p1, const ProjectorMatrix& p2) {
  const StructureDecomposition dec = decompose_difference(p2, p1);
  if (dec.plus_vectors.size() != dec.minus_vectors.size())
    throw Error(Errc::invalid_parameter,
                "projector ranks differ; no conjugating exponential exists");
  Matrix a = Matrix::Zero(dec.dim, dec.dim);
  for (const auto& plane : dec.planes)
    a += plane.theta * (plane.e_plus * plane.e_minus.adjoint() -
                        plane.e_minus * plane.e_plus.adjoint());
  for (std::size_t i = 0; i < dec.plus_vectors.size(); ++i) {
    // +1 eigenvectors lie in Ran(1−P1), −1 eigenvectors in Ran P1; any
    // pairing gives a valid π/2 rotation.
    const Vector& ap = dec.plus_vectors[i];
    const Vector& am = dec.minus_vectors[i];
    a += (kPi / 2.0) * (ap * am.adjoint() - am * ap.adjoint());
  }
  return a;
}

Matrix exp_antihermitian(const Matrix& a) {
  const Matrix ia = std::complex<double>(0.0, 1.0) * a;
  const auto es = eigensolve(ia);
  const Eigen::Index n = a.rows();
  Matrix phases = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    phases(i, i) = std::exp(std::complex<double>(0.0, -es.eigenvalues()(i)));
  return es.eigenvectors() * phases * es.eigenvectors().adjoint();
}

ProjectorMatrix exp_chart(const ProjectorMatrix& p, const Matrix& a) {
  if (a.rows() != p.dim() || a.cols() != p.dim())
    throw Error(Errc::invalid_parameter, "chart direction has wrong shape");
  const double scale = std::max(1.0, a.norm());
  if ((a + a.adjoint()).norm() > 1e-12 * scale)
    throw Error(Errc::not_in_tangent_domain, "chart direction not anti-Hermitian");
  const Matrix comp = Matrix::Identity(p.dim(), p.dim()) - p.entries;
  if ((p.entries * a * p.entries).norm() > 1e-12 * scale ||
      (comp * a * comp).norm() > 1e-12 * scale)
    throw Error(Errc::not_in_tangent_domain, "chart direction has diagonal blocks");
  const Matrix u = exp_antihermitian(a);
  return ProjectorMatrix::from(u * p.entries * u.adjoint());
}

double p0_trace(const Matrix& q, const ProjectorMatrix& p0) {
  const Matrix comp = Matrix::Identity(p0.dim(), p0.dim()) - p0.entries;
  const std::complex<double> t =
      (p0.entries * q * p0.entries).trace() + (comp * q * comp).trace();
  return t.real();
}

TangentVector gradient_projection(const Matrix& h, const ProjectorMatrix& p) {
  const Matrix comp = Matrix::Identity(p.dim(), p.dim()) - p.entries;
  return TangentVector{p.entries * h * comp + comp * h * p.entries};
}

void validate_tangent(const TangentVector& v, const ProjectorMatrix& p, double tol) {
  const double scale = std::max(1.0, v.matrix.norm());
  if ((v.matrix - v.matrix.adjoint()).norm() > tol * scale)
    throw Error(Errc::not_in_tangent_domain, "tangent vector not Hermitian");
  const Matrix comp = Matrix::Identity(p.dim(), p.dim()) - p.entries;
  if ((p.entries * v.matrix * p.entries).norm() > tol * scale ||
      (comp * v.matrix * comp).norm() > tol * scale)
    throw Error(Errc::not_in_tangent_domain, "tangent vector has diagonal blocks");
}

bool is_c_symmetric(const Matrix& q, const AntiunitaryMap& c, double tol) {
  if (q.rows() != c.dim() || q.cols() != c.dim())
    throw Error(Errc::invalid_parameter, "dimension mismatch");
  return (q + c.conjugate_operator(q)).norm() <= tol;
}

ComponentClassification component_classify(const ProjectorMatrix& p, const ProjectorMatrix& p0,
                                           const AntiunitaryMap& c) {
  if (!is_c_symmetric(p.entries - p0.entries, c))
    throw Error(Errc::not_c_symmetric, "P - P0 is not C-symmetric");
  const Matrix v = range_basis(p);
  ProjectorMatrix p0_plus = ProjectorMatrix::from(
      Matrix(Matrix::Identity(p0.dim(), p0.dim()) - p0.entries));
  const Matrix w = range_basis(p0_plus);

  Matrix joint(p.dim(), v.cols() + w.cols());
  joint.leftCols(v.cols()) = v;
  joint.rightCols(w.cols()) = w;
  Eigen::JacobiSVD<Matrix> svd(joint);
  const double thresh = 1e-8 * svd.singularValues()(0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thresh) ++rank;

  ComponentClassification out;
  out.intersection_dim = v.cols() + w.cols() - rank;
  out.component = out.intersection_dim % 2 == 0 ? Component::e1 : Component::e_minus_1;
  return out;
}

SpectrumCheckReport c_symmetric_spectrum_check(const Matrix& gamma, const AntiunitaryMap& c,
                                               double cluster_tol) {
  const double scale = std::max(1.0, gamma.norm());
  if ((gamma - gamma.adjoint()).norm() > 1e-12 * scale)
    throw Error(Errc::invalid_parameter, "gamma not Hermitian");
  if (!is_c_symmetric(gamma, c)) throw Error(Errc::not_c_symmetric, "gamma not C-symmetric");

  const auto es = eigensolve(gamma);
  const Eigen::Index n = gamma.rows();
  const double tol = cluster_tol * scale;

  // Group sorted eigenvalues into clusters; demand clean gaps.
  std::vector<std::pair<double, std::vector<Eigen::Index>>> clusters;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = es.eigenvalues()(i);
    if (!clusters.empty() && lam - es.eigenvalues()(i - 1) <= tol) {
      clusters.back().second.push_back(i);
    } else {
      if (!clusters.empty() && lam - es.eigenvalues()(i - 1) < 10.0 * tol)
        throw Error(Errc::cluster_ambiguous, "spectral gap below clustering tolerance");
      clusters.push_back({lam, {i}});
    }
  }
  for (auto& cl : clusters) {
    double mean = 0.0;
    for (const auto i : cl.second) mean += es.eigenvalues()(i);
    cl.first = mean / static_cast<double>(cl.second.size());
  }

  auto basis_of = [&](const std::vector<Eigen::Index>& idx) {
    Matrix b(n, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) b.col(static_cast<Eigen::Index>(j)) =
        es.eigenvectors().col(idx[j]);
    return b;
  };

  SpectrumCheckReport report;
  for (const auto& cl : clusters) {
    const double mu = cl.first;
    if (!(mu > 10.0 * tol && mu < 1.0 - 10.0 * tol)) continue;  // only μ ∈ (0,1)
    const auto* partner = [&]() -> const std::pair<double, std::vector<Eigen::Index>>* {
      for (const auto& other : clusters)
        if (std::abs(other.first + mu) <= 10.0 * tol) return &other;
      return nullptr;
    }();

    SpectrumClusterReport r;
    r.mu = mu;
    r.dim_mu = static_cast<Eigen::Index>(cl.second.size());
    if (partner == nullptr) {
      r.dim_mu_squared = r.dim_mu;
      r.conjugation_distance = std::numeric_limits<double>::infinity();
      r.divisible_by_4 = false;
      report.pass = false;
      report.clusters.push_back(r);
      continue;
    }
    r.dim_mu_squared = r.dim_mu + static_cast<Eigen::Index>(partner->second.size());
    r.divisible_by_4 = r.dim_mu_squared % 4 == 0;

    const Matrix u_mu = basis_of(cl.second);
    const Matrix u_neg = basis_of(partner->second);
    const Matrix cu = c.k * u_mu.conjugate();  // columns stay orthonormal
    r.conjugation_distance = (cu * cu.adjoint() - u_neg * u_neg.adjoint()).norm();
    if (r.conjugation_distance > 1e-9 || !r.divisible_by_4) report.pass = false;
    report.clusters.push_back(r);
  }
  return report;
}

}  // namespace bdfp::proj

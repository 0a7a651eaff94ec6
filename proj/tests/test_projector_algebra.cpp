#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bdfp/errors.hpp"
#include "bdfp/projector_algebra.hpp"
#include "test_support.hpp"

using namespace bdfp;
using namespace bdfp::proj;
using test::haar_unitary;
using test::random_gaussian_matrix;
using test::random_projector;
using test::random_tangent;

namespace {

double operator_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

ProjectorMatrix rotate_projector(const ProjectorMatrix& p0, double theta, Eigen::Index i,
                                 Eigen::Index j) {
  Matrix u = Matrix::Identity(p0.dim(), p0.dim());
  u(i, i) = std::cos(theta);
  u(j, j) = std::cos(theta);
  u(i, j) = -std::sin(theta);
  u(j, i) = std::sin(theta);
  return ProjectorMatrix::from(u * p0.entries * u.adjoint());
}

// C-commuting chart direction at the swap vacuum (or any C-compatible base).
Matrix c_commuting_tangent(std::mt19937_64& rng, const ProjectorMatrix& p,
                           const AntiunitaryMap& c, double s) {
  Matrix a = random_tangent(rng, p, 1.0);
  a = (a + c.conjugate_operator(a)) / 2.0;
  if (a.norm() > 0) a *= s / a.norm();
  return a;
}

}  // namespace

TEST_CASE("2x2 rotation geometry") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  const ProjectorMatrix p0 = ProjectorMatrix::from(d);

  SUBCASE("identity difference is empty") {
    const StructureDecomposition dec = decompose_difference(p0, p0);
    CHECK(dec.plus_vectors.empty());
    CHECK(dec.minus_vectors.empty());
    CHECK(dec.planes.empty());
    CHECK(reconstruct(dec).norm() == 0.0);
    CHECK(canonical_log(p0, p0).norm() == 0.0);
  }

  SUBCASE("quarter rotation gives eigenvalues +-sqrt(2)/2") {
    const ProjectorMatrix p1 = rotate_projector(p0, M_PI / 4.0, 0, 1);
    const StructureDecomposition dec = decompose_difference(p1, p0);
    REQUIRE(dec.planes.size() == 1);
    CHECK(std::sin(dec.planes[0].theta) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK((reconstruct(dec) - (p1.entries - p0.entries)).norm() <= 1e-12);
  }

  SUBCASE("canonical log has operator norm theta") {
    for (const double theta : {0.1, 0.4, 1.2}) {
      const ProjectorMatrix p2 = rotate_projector(p0, theta, 0, 1);
      const Matrix a = canonical_log(p0, p2);
      CHECK(operator_norm(a) == doctest::Approx(theta).epsilon(1e-10));
      CHECK((exp_chart(p0, a).entries - p2.entries).norm() <= 1e-12);
    }
  }

  SUBCASE("single plane at theta = pi/6 reconstructs eigenvalues +-1/2") {
    StructureDecomposition dec;
    dec.dim = 2;
    PrincipalPlane plane;
    plane.e_minus = Vector::Zero(2);
    plane.e_minus(0) = 1.0;
    plane.e_plus = Vector::Zero(2);
    plane.e_plus(1) = 1.0;
    plane.theta = M_PI / 6.0;
    dec.planes.push_back(plane);
    Eigen::SelfAdjointEigenSolver<Matrix> es(reconstruct(dec));
    CHECK(es.eigenvalues()(0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(es.eigenvalues()(1) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("structure decomposition against the dense eigensolver oracle") {
  std::mt19937_64 rng(101);
  for (const Eigen::Index n : {4, 8, 16, 24}) {
    for (int rep = 0; rep < 6; ++rep) {
      const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng() % (n - 1));
      const ProjectorMatrix p0 = random_projector(rng, n, rank);
      const ProjectorMatrix p1 = exp_chart(p0, random_tangent(rng, p0, 1.1));
      const Matrix q = p1.entries - p0.entries;
      const StructureDecomposition dec = decompose_difference(p1, p0);

      CHECK((reconstruct(dec) - q).norm() <= 1e-10);

      // Sector membership and mutual orthonormality of the assembled family.
      const Matrix comp = Matrix::Identity(n, n) - p0.entries;
      std::vector<Vector> family;
      for (const auto& a : dec.plus_vectors) family.push_back(a);
      for (const auto& a : dec.minus_vectors) family.push_back(a);
      for (const auto& plane : dec.planes) {
        CHECK((p0.entries * plane.e_plus).norm() <= 1e-10);
        CHECK((comp * plane.e_minus).norm() <= 1e-10);
        family.push_back(plane.e_plus);
        family.push_back(plane.e_minus);
      }
      for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) {
          const double expected = i == j ? 1.0 : 0.0;
          CHECK(std::abs(std::abs(family[j].dot(family[i])) - expected) <= 1e-10);
        }

      // Thetas sorted non-increasing.
      for (std::size_t j = 0; j + 1 < dec.planes.size(); ++j)
        CHECK(dec.planes[j].theta >= dec.planes[j + 1].theta);

      // Q^{++} spectrum = {sin²θ_j} ∪ {1 per a_i}: the block identity.
      Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(comp * q * comp));
      std::vector<double> expected;
      for (const auto& plane : dec.planes)
        expected.push_back(std::pow(std::sin(plane.theta), 2));
      for (std::size_t j = 0; j < dec.plus_vectors.size(); ++j) expected.push_back(1.0);
      std::sort(expected.begin(), expected.end());
      std::vector<double> got;
      for (Eigen::Index i = 0; i < n; ++i)
        if (es.eigenvalues()(i) > 1e-9) got.push_back(es.eigenvalues()(i));
      std::sort(got.begin(), got.end());
      REQUIRE(got.size() == expected.size());
      for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-9));

      // Eq. (P1-P0)² = Q^{++} - Q^{--} in blocks relative to P0.
      const Matrix eqq = q * q - (comp * q * comp - p0.entries * q * p0.entries);
      CHECK(eqq.norm() <= 1e-10);

      // P0-trace of a projector difference is an integer.
      const double tr = p0_trace(q, p0);
      CHECK(std::abs(tr - std::round(tr)) <= 1e-9);
      CHECK(tr == doctest::Approx(q.trace().real()).epsilon(1e-10));
    }
  }
}

TEST_CASE("canonical log and chart round trips, including full flips") {
  std::mt19937_64 rng(202);
  for (const Eigen::Index n : {6, 12, 24}) {
    for (int rep = 0; rep < 6; ++rep) {
      const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng() % (n - 1));
      const ProjectorMatrix p0 = random_projector(rng, n, rank);
      const ProjectorMatrix p1 = exp_chart(p0, random_tangent(rng, p0, 1.3));
      const Matrix a = canonical_log(p0, p1);

      CHECK((a + a.adjoint()).norm() <= 1e-11);
      CHECK(operator_norm(a) <= M_PI / 2.0 + 1e-12);
      CHECK((exp_chart(p0, a).entries - p1.entries).norm() <= 1e-9);

      // Force ±1 eigenvalues: swap an occupied direction for an empty one.
      Eigen::SelfAdjointEigenSolver<Matrix> es(p0.entries);
      const Vector occ = es.eigenvectors().col(n - 1);   // eigenvalue 1
      const Vector emp = es.eigenvectors().col(0);       // eigenvalue 0
      const Matrix flip = p0.entries - occ * occ.adjoint() + emp * emp.adjoint();
      const ProjectorMatrix p2 = ProjectorMatrix::from((flip + flip.adjoint()) / 2.0);
      CHECK(operator_norm(p2.entries - p0.entries) == doctest::Approx(1.0).epsilon(1e-10));
      const Matrix a2 = canonical_log(p0, p2);
      CHECK((exp_chart(p0, a2).entries - p2.entries).norm() <= 1e-9);
    }
  }

  // Rank mismatch: no conjugating exponential exists.
  std::mt19937_64 rng2(7);
  const ProjectorMatrix pa = random_projector(rng2, 6, 2);
  const ProjectorMatrix pb = random_projector(rng2, 6, 3);
  CHECK_THROWS_AS(canonical_log(pa, pb), Error);
}

TEST_CASE("exp chart domain validation and commutator bound") {
  std::mt19937_64 rng(303);
  const ProjectorMatrix p = random_projector(rng, 10, 4);

  CHECK((exp_chart(p, Matrix::Zero(10, 10)).entries - p.entries).norm() <= 1e-14);

  // Hermitian direction: rejected.
  const Matrix braw = random_gaussian_matrix(rng, 10, 10);
  const Matrix bad = (braw + braw.adjoint()) / 2.0;
  CHECK_THROWS_AS(exp_chart(p, bad), Error);
  // Anti-Hermitian but with diagonal blocks: rejected.
  const Matrix draw = random_gaussian_matrix(rng, 10, 10);
  const Matrix diag_block = p.entries * (draw - draw.adjoint()) * p.entries;
  if (diag_block.norm() > 1e-6) CHECK_THROWS_AS(exp_chart(p, diag_block), Error);

  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_tangent(rng, p, 0.2 + 0.1 * rep);
    const ProjectorMatrix chart = exp_chart(p, a);
    const Matrix commutator = a * p.entries - p.entries * a;
    CHECK((chart.entries - p.entries).norm() <=
          commutator.norm() * std::exp(operator_norm(a)) + 1e-12);
  }
}

TEST_CASE("gradient projection") {
  std::mt19937_64 rng(404);
  const Eigen::Index n = 12;
  const ProjectorMatrix p = random_projector(rng, n, 5);
  const Matrix hraw = random_gaussian_matrix(rng, n, n);
  const Matrix h = (hraw + hraw.adjoint()) / 2.0;

  const TangentVector v = gradient_projection(h, p);
  CHECK_NOTHROW(validate_tangent(v, p));

  // Idempotence on off-diagonal blocks.
  const TangentVector vv = gradient_projection(v.matrix, p);
  CHECK((vv.matrix - v.matrix).norm() <= 1e-12 * std::max(1.0, v.matrix.norm()));

  // Commuting H has zero gradient: H = f(P).
  const Matrix commuting = 2.0 * p.entries + 0.5 * Matrix::Identity(n, n);
  CHECK(gradient_projection(commuting, p).matrix.norm() <= 1e-12);

  // Diagonal projector extracts the off-diagonal blocks.
  Matrix d = Matrix::Zero(4, 4);
  d(0, 0) = d(1, 1) = 1.0;
  const ProjectorMatrix pd = ProjectorMatrix::from(d);
  const Matrix h4raw = random_gaussian_matrix(rng, 4, 4);
  const Matrix h4 = (h4raw + h4raw.adjoint()) / 2.0;
  const Matrix g4 = gradient_projection(h4, pd).matrix;
  CHECK((g4.topLeftCorner(2, 2)).norm() <= 1e-14);
  CHECK((g4.bottomRightCorner(2, 2)).norm() <= 1e-14);
  CHECK((g4.topRightCorner(2, 2) - h4.topRightCorner(2, 2)).norm() <= 1e-14);

  // C-symmetric transport: -CDC = D and C-symmetric P give -CvC = v.
  const Eigen::Index n_half = 6;
  const AntiunitaryMap c = standard_conjugation(n_half);
  const ProjectorMatrix p0 = swap_vacuum_projector(n_half);
  const ProjectorMatrix pc = exp_chart(p0, c_commuting_tangent(rng, p0, c, 0.9));
  const Matrix draw2 = random_gaussian_matrix(rng, 2 * n_half, 2 * n_half);
  const Matrix dherm = (draw2 + draw2.adjoint()) / 2.0;
  const Matrix dmat = (dherm - c.conjugate_operator(dherm)) / 2.0;  // -CDC = D
  const Matrix vc = gradient_projection(dmat, pc).matrix;
  CHECK((vc + c.conjugate_operator(vc)).norm() <= 1e-10);
}

TEST_CASE("standard conjugation and C-symmetry predicate") {
  const AntiunitaryMap c = standard_conjugation(1);
  Vector v = Vector::Zero(2);
  v(0) = 1.0;
  const Vector cv = c.apply(v);
  CHECK(std::abs(cv(1) - 1.0) <= 1e-15);
  CHECK(std::abs(cv(0)) <= 1e-15);

  std::mt19937_64 rng(505);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix g = random_gaussian_matrix(rng, 2, 1);
    Vector w = g.col(0);
    CHECK((c.apply(c.apply(w)) - w).norm() <= 1e-14 * w.norm());
  }

  const ProjectorMatrix p0 = swap_vacuum_projector(1);
  const Matrix swapped = c.conjugate_operator(p0.entries);
  CHECK((swapped - (Matrix::Identity(2, 2) - p0.entries)).norm() <= 1e-14);

  // Q = |ψ⟩⟨ψ| - |Cψ⟩⟨Cψ| is C-symmetric; a lone |ψ⟩⟨ψ| is not; 0 is.
  const AntiunitaryMap c4 = standard_conjugation(2);
  const Matrix g4 = random_gaussian_matrix(rng, 4, 1);
  const Vector psi = g4.col(0) / g4.col(0).norm();
  const Vector cpsi = c4.apply(psi);
  const Matrix q = psi * psi.adjoint() - cpsi * cpsi.adjoint();
  CHECK(is_c_symmetric(q, c4));
  CHECK_FALSE(is_c_symmetric(Matrix(psi * psi.adjoint()), c4));
  CHECK(is_c_symmetric(Matrix::Zero(4, 4), c4));
}

TEST_CASE("component classification") {
  std::mt19937_64 rng(606);
  const Eigen::Index n_half = 5;
  const AntiunitaryMap c = standard_conjugation(n_half);
  const ProjectorMatrix p0 = swap_vacuum_projector(n_half);

  const ComponentClassification vac = component_classify(p0, p0, c);
  CHECK(vac.component == Component::e1);
  CHECK(vac.intersection_dim == 0);

  // Conjugate rank-2 excitation: ψ in Ran 𝒫⁰₊ (first block).
  Vector psi = Vector::Zero(2 * n_half);
  const Matrix g = random_gaussian_matrix(rng, n_half, 1);
  psi.head(n_half) = g.col(0) / g.col(0).norm();
  const Vector cpsi = c.apply(psi);
  const Matrix pair = p0.entries + psi * psi.adjoint() - cpsi * cpsi.adjoint();
  const ProjectorMatrix p_pair = ProjectorMatrix::from((pair + pair.adjoint()) / 2.0);
  const ComponentClassification exc = component_classify(p_pair, p0, c);
  CHECK(exc.component == Component::e_minus_1);
  CHECK(exc.intersection_dim == 1);

  // Classification constant along a C-commuting exponential path.
  const Matrix a = c_commuting_tangent(rng, p0, c, 1.2);
  for (const double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const ProjectorMatrix pt = exp_chart(p0, Matrix(t * a));
    CHECK(component_classify(pt, p0, c).component == Component::e1);
  }
  // Same starting from the rank-2 excitation.
  const Matrix a2 = c_commuting_tangent(rng, p_pair, c, 1.2);
  for (const double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const ProjectorMatrix pt = exp_chart(p_pair, Matrix(t * a2));
    CHECK(component_classify(pt, p0, c).component == Component::e_minus_1);
  }

  // Non-C-symmetric difference is rejected.
  const ProjectorMatrix p_bad = exp_chart(p0, random_tangent(rng, p0, 0.8));
  if (!is_c_symmetric(p_bad.entries - p0.entries, c))
    CHECK_THROWS_AS(component_classify(p_bad, p0, c), Error);
}

TEST_CASE("C-symmetric spectra: conjugation pairing and mod-4 dimensions") {
  std::mt19937_64 rng(707);

  SUBCASE("zero gamma is a vacuous pass") {
    const AntiunitaryMap c = standard_conjugation(3);
    const SpectrumCheckReport rep = c_symmetric_spectrum_check(Matrix::Zero(6, 6), c);
    CHECK(rep.pass);
    CHECK(rep.clusters.empty());
  }

  SUBCASE("4-dim constructed plane + conjugate plane has dim 4") {
    const AntiunitaryMap c = standard_conjugation(2);
    const ProjectorMatrix p0 = swap_vacuum_projector(2);
    // e₋ = u₃ ∈ Ran P0, e₊ = u₂ ∈ Ran(1−P0); C maps them to u₁, u₄.
    const double theta = 0.6;
    Matrix a = Matrix::Zero(4, 4);
    a(1, 2) = theta;
    a(2, 1) = -theta;
    a(0, 3) = -theta;
    a(3, 0) = theta;
    CHECK((c.conjugate_operator(a) - a).norm() <= 1e-14);
    const ProjectorMatrix p = exp_chart(p0, a);
    const Matrix gamma = p.entries - p0.entries;
    const SpectrumCheckReport rep = c_symmetric_spectrum_check(gamma, c);
    CHECK(rep.pass);
    REQUIRE(rep.clusters.size() == 1);
    CHECK(rep.clusters[0].mu == doctest::Approx(std::sin(theta)).epsilon(1e-12));
    CHECK(rep.clusters[0].dim_mu_squared == 4);
    CHECK(rep.clusters[0].divisible_by_4);
    CHECK(rep.clusters[0].conjugation_distance <= 1e-9);
  }

  SUBCASE("random C-symmetric states in higher dimension") {
    for (const Eigen::Index n_half : {4, 8, 16}) {
      const AntiunitaryMap c = standard_conjugation(n_half);
      const ProjectorMatrix p0 = swap_vacuum_projector(n_half);
      const Matrix a = c_commuting_tangent(rng, p0, c, 1.0);
      const ProjectorMatrix p = exp_chart(p0, a);
      const SpectrumCheckReport rep = c_symmetric_spectrum_check(p.entries - p0.entries, c);
      CHECK(rep.pass);
      for (const auto& cl : rep.clusters) CHECK(cl.dim_mu_squared % 4 == 0);
    }
  }

  SUBCASE("no 2-dim C-symmetric state has an eigenvalue inside (0,1)") {
    // Exhaustive parameterization: rank-1 projectors P = ½(I + n̂·σ⃗) plus the
    // trivial ranks. C-symmetric differences with the swap conjugation.
    const AntiunitaryMap c = standard_conjugation(1);
    const ProjectorMatrix p0 = swap_vacuum_projector(1);
    int found = 0;
    for (int it = 0; it < 200; ++it) {
      const double z = -1.0 + 2.0 * (it % 20) / 19.0;
      const double phi = 2.0 * M_PI * (it / 20) / 10.0;
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      Matrix p(2, 2);
      p(0, 0) = (1.0 + z) / 2.0;
      p(1, 1) = (1.0 - z) / 2.0;
      p(0, 1) = 0.5 * s * std::exp(std::complex<double>(0.0, -phi));
      p(1, 0) = std::conj(p(0, 1));
      const Matrix q = p - p0.entries;
      if (!is_c_symmetric(q, c, 1e-9)) continue;
      Eigen::SelfAdjointEigenSolver<Matrix> es(q);
      for (Eigen::Index i = 0; i < 2; ++i) {
        const double mu = std::abs(es.eigenvalues()(i));
        if (mu > 1e-9 && mu < 1.0 - 1e-9) ++found;
      }
    }
    CHECK(found == 0);
  }

  SUBCASE("cluster-ambiguous gaps are rejected") {
    const AntiunitaryMap c = standard_conjugation(4);
    const ProjectorMatrix p0 = swap_vacuum_projector(4);
    // Two conjugate-plane pairs with nearly identical angles.
    Matrix a = Matrix::Zero(8, 8);
    auto put_pair = [&](Eigen::Index em, Eigen::Index ep, double theta) {
      // e₋ = u_em ∈ Ran P0 (last block), e₊ = u_ep ∈ first block, plus the
      // conjugated partner plane.
      a(ep, em) += theta;
      a(em, ep) += -theta;
      const Eigen::Index cem = em - 4;  // C u_{4+j} = u_j
      const Eigen::Index cep = ep + 4;
      a(cem, cep) += -theta;
      a(cep, cem) += theta;
    };
    put_pair(4, 1, 0.30);
    put_pair(6, 3, 0.30 + 2e-8);
    REQUIRE((c.conjugate_operator(a) - a).norm() <= 1e-12);
    const ProjectorMatrix p = exp_chart(p0, a);
    CHECK_THROWS_AS(c_symmetric_spectrum_check(p.entries - p0.entries, c), Error);
  }
}

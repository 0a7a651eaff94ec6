#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bdfp::proj {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Hermitian idempotent matrix, validated on construction
// (‖P²−P‖_F and ‖P−P†‖_F within 1e-12·max(1,‖P‖_F)).
struct ProjectorMatrix {
  Matrix entries;

  static ProjectorMatrix from(Matrix m);  // throws not-a-projector
  Eigen::Index dim() const { return entries.rows(); }
};

// Antiunitary v ↦ K·conj(v) with unitary K and K·conj(K) = 1 (involution).
struct AntiunitaryMap {
  Matrix k;

  static AntiunitaryMap from(Matrix k);
  Eigen::Index dim() const { return k.rows(); }
  Vector apply(const Vector& v) const { return k * v.conjugate(); }
  // C A C acts on matrices as K·conj(A)·K.
  Matrix conjugate_operator(const Matrix& a) const { return k * a.conjugate() * k; }
};

// Block swap [[0,I],[I,0]] with conjugation; real, so an involution. Maps the
// reference vacuum Ran 𝒫⁰₋ (last block) onto Ran 𝒫⁰₊ (first block).
AntiunitaryMap standard_conjugation(Eigen::Index n_half);
// diag(0, I): the reference vacuum projector matching standard_conjugation.
ProjectorMatrix swap_vacuum_projector(Eigen::Index n_half);

// One principal-angle plane of a projector difference: e_plus ∈ Ran(1−P0),
// e_minus ∈ Ran P0, eigenvalue pair ±sin(theta), theta ∈ (0, π/2).
struct PrincipalPlane {
  Vector e_plus;
  Vector e_minus;
  double theta = 0.0;
};

struct StructureDecomposition {
  Eigen::Index dim = 0;
  std::vector<Vector> plus_vectors;   // Q a = +a
  std::vector<Vector> minus_vectors;  // Q a = −a
  std::vector<PrincipalPlane> planes;  // thetas sorted non-increasing
};

// Eigenvalue-clustering tolerance, relative to ‖Q‖.
inline constexpr double kClusterTol = 1e-8;

StructureDecomposition decompose_difference(const ProjectorMatrix& p1, const ProjectorMatrix& p0);

// Q = Σ|aᵢ⟩⟨aᵢ| − Σ|a₋ᵢ⟩⟨a₋ᵢ| + Σ sinθⱼ (|fⱼ⟩⟨fⱼ| − |f₋ⱼ⟩⟨f₋ⱼ|) with
// f₊ = √((1−s)/2) e₋ + √((1+s)/2) e₊, f₋ = −√((1+s)/2) e₋ + √((1−s)/2) e₊.
Matrix reconstruct(const StructureDecomposition& dec);

// Anti-Hermitian, block-off-diagonal A with e^A P1 e^{−A} = P2 and
// ‖A‖ ≤ π/2; ±1 eigenvalue pairs get π/2 rotations.
Matrix canonical_log(const ProjectorMatrix& p1, const ProjectorMatrix& p2);

// e^a P e^{−a} for a in the off-diagonal anti-Hermitian chart domain;
// throws not-in-m_P otherwise.
ProjectorMatrix exp_chart(const ProjectorMatrix& p, const Matrix& a);

// exp of an anti-Hermitian matrix via the Hermitian eigendecomposition of ia.
Matrix exp_antihermitian(const Matrix& a);

// Tr(Q^{++}) + Tr(Q^{--}) with blocks relative to p0.
double p0_trace(const Matrix& q, const ProjectorMatrix& p0);

struct TangentVector {
  Matrix matrix;  // Hermitian, P·v·P = (1−P)·v·(1−P) = 0 at its base point
};

// [[H,P],P] = P H (1−P) + (1−P) H P: the tangent-space projection of H.
TangentVector gradient_projection(const Matrix& h, const ProjectorMatrix& p);
void validate_tangent(const TangentVector& v, const ProjectorMatrix& p, double tol = 1e-12);

// ‖Q + C Q C‖_F ≤ tol, the matrix form of −CQC = Q.
bool is_c_symmetric(const Matrix& q, const AntiunitaryMap& c, double tol = 1e-10);

enum class Component { e1, e_minus_1 };

struct ComponentClassification {
  Component component = Component::e1;
  Eigen::Index intersection_dim = 0;  // dim(Ran P ∩ Ran(1−P0))
};

// E1 iff dim(Ran P ∩ Ran 𝒫⁰₊) is even; requires P − P0 C-symmetric.
ComponentClassification component_classify(const ProjectorMatrix& p, const ProjectorMatrix& p0,
                                           const AntiunitaryMap& c);

struct SpectrumClusterReport {
  double mu = 0.0;                    // cluster mean in (0,1)
  Eigen::Index dim_mu = 0;            // dim E_μ
  Eigen::Index dim_mu_squared = 0;    // dim E^{γ²}_{μ²}
  double conjugation_distance = 0.0;  // ‖Proj(C E_μ) − Proj(E_{−μ})‖_F
  bool divisible_by_4 = false;
};

struct SpectrumCheckReport {
  std::vector<SpectrumClusterReport> clusters;
  bool pass = true;
};

// For each eigenvalue cluster μ ∈ (0,1) of a C-symmetric Hermitian γ:
// verifies C E_μ = E_{−μ} and that dim E^{γ²}_{μ²} is divisible by 4.
SpectrumCheckReport c_symmetric_spectrum_check(const Matrix& gamma, const AntiunitaryMap& c,
                                               double cluster_tol = kClusterTol);

}  // namespace bdfp::proj

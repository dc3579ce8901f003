#include "qgrad/grad_operator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qgrad {

namespace {

double spectral_radius_of(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void require_density(const Eigen::MatrixXcd& rho, const char* what) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument(std::string(what) + ": density matrix not square");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
    throw std::invalid_argument(std::string(what) + ": trace is not 1");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument(std::string(what) + ": not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument(std::string(what) + ": not positive semidefinite");
}

// Tr over the trailing factor of a (head*rest) x (head*rest) matrix.
Eigen::MatrixXcd trace_out_tail(const Eigen::MatrixXcd& full, int head) {
  const int rest = static_cast<int>(full.rows()) / head;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(head, head);
  for (int i = 0; i < head; ++i)
    for (int j = 0; j < head; ++j)
      for (int r = 0; r < rest; ++r) out(i, j) += full(i * rest + r, j * rest + r);
  return out;
}

Eigen::MatrixXcd kron_cx(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXd& h, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::VectorXcd phases(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    phases(i) = std::exp(cx(0.0, -lam(i) * t));
  return v.cast<cx>() * phases.asDiagonal() * v.transpose().cast<cx>();
}

}  // namespace

GradientOperator GradientOperator::from_matrix(Eigen::MatrixXd m, double prescale) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("grad_operator: matrix not square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("grad_operator: matrix not symmetric");
  const double stored_radius = spectral_radius_of(m);
  if (stored_radius > kSpectralWindow + 1e-12)
    throw std::invalid_argument("grad_operator: spectrum outside the admissible window");
  GradientOperator op;
  op.matrix = std::move(m);
  op.prescale = prescale;
  op.spectral_radius = stored_radius / prescale;
  return op;
}

Eigen::MatrixXd build_D_raw(const PolynomialProblem& problem,
                            const DressedState& state) {
  if (state.d != problem.d)
    throw std::invalid_argument("grad_operator: state dimension does not match problem");
  const int dim = problem.d + 1;
  const Eigen::VectorXd xhat = state.amps.head(dim);
  // (I (x) |Xhat>^{(x)p-1})^T M (I (x) |Xhat>^{(x)p-1}) equals the partial
  // trace against the pure state rho_X on the trailing p-1 slots.
  Eigen::VectorXd tail = Eigen::VectorXd::Ones(1);
  for (int i = 0; i < problem.p - 1; ++i) {
    Eigen::VectorXd next(tail.size() * dim);
    for (Eigen::Index a = 0; a < tail.size(); ++a)
      next.segment(a * dim, dim) = tail(a) * xhat;
    tail.swap(next);
  }
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(dim * tail.size(), dim);
  for (int j = 0; j < dim; ++j) W.block(j * tail.size(), j, tail.size(), 1) = tail;
  return W.transpose() * build_M(problem) * W;
}

GradientOperator build_D_exact(const PolynomialProblem& problem,
                               const DressedState& state) {
  const Eigen::MatrixXd raw = build_D_raw(problem, state);
  GradientOperator op;
  op.matrix = Eigen::MatrixXd::Zero(state.padded_dim(), state.padded_dim());
  op.matrix.topLeftCorner(raw.rows(), raw.cols()) = raw;
  op.spectral_radius = spectral_radius_of(op.matrix);
  op.prescale = (op.spectral_radius > kSpectralWindow)
                    ? kSpectralWindow / op.spectral_radius
                    : 1.0;
  op.matrix *= op.prescale;
  return op;
}

Eigen::MatrixXcd evolution(const GradientOperator& op, double t) {
  return hermitian_exp(op.matrix, t);
}

ControlledEvolution::ControlledEvolution(const GradientOperator& op, int chi)
    : chi_(chi) {
  if (chi < 1) throw std::invalid_argument("grad_operator: chi must be >= 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

Eigen::MatrixXcd ControlledEvolution::block(std::uint64_t j, bool inverse) const {
  const double sign = inverse ? 1.0 : -1.0;
  Eigen::VectorXcd phases(eigenvalues_.size());
  for (Eigen::Index l = 0; l < eigenvalues_.size(); ++l)
    phases(l) = std::exp(cx(0.0, sign * 2.0 * std::numbers::pi * eigenvalues_(l) *
                                     static_cast<double>(j)));
  return eigenvectors_.cast<cx>() * phases.asDiagonal() *
         eigenvectors_.transpose().cast<cx>();
}

void ControlledEvolution::apply(StateVector& state, bool inverse) const {
  const RegisterLayout& layout = state.layout;
  if (layout.chi != chi_ ||
      layout.n_v != static_cast<int>(std::log2(eigenvalues_.size())))
    throw std::invalid_argument("grad_operator: layout does not match evolution");
  const std::uint64_t nv = std::uint64_t{1} << layout.n_v;
  const std::uint64_t ne = std::uint64_t{1} << layout.chi;
  const std::uint64_t upper_count = layout.dim() >> (layout.n_v + layout.chi);
  const double sign = inverse ? 1.0 : -1.0;

  const Eigen::MatrixXcd v = eigenvectors_.cast<cx>();
  Eigen::VectorXcd buf(nv), eig(nv), out(nv);
  for (std::uint64_t j = 0; j < ne; ++j) {
    Eigen::VectorXcd phases(eigenvalues_.size());
    for (Eigen::Index l = 0; l < eigenvalues_.size(); ++l)
      phases(l) = std::exp(cx(0.0, sign * 2.0 * std::numbers::pi * eigenvalues_(l) *
                                       static_cast<double>(j)));
    for (std::uint64_t upper = 0; upper < upper_count; ++upper) {
      const std::uint64_t base =
          (upper << (layout.n_v + layout.chi)) | (j << layout.n_v);
      for (std::uint64_t r = 0; r < nv; ++r) buf(r) = state.amps[base | r];
      eig.noalias() = v.transpose() * buf;
      eig.array() *= phases.array();
      out.noalias() = v * eig;
      for (std::uint64_t r = 0; r < nv; ++r) state.amps[base | r] = out(r);
    }
  }
}

GradientOperator truncate_spectrum(const GradientOperator& op, int chi) {
  if (chi < 1) throw std::invalid_argument("grad_operator: chi must be >= 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
  const std::int64_t n = std::int64_t{1} << chi;
  Eigen::VectorXd binned(es.eigenvalues().size());
  for (Eigen::Index l = 0; l < binned.size(); ++l) {
    std::int64_t bin = std::llround(es.eigenvalues()(l) * static_cast<double>(n));
    if (bin >= n / 2) bin -= n;  // the half-way phase reads as -1/2
    binned(l) = static_cast<double>(bin) / static_cast<double>(n);
  }
  GradientOperator out;
  out.matrix = es.eigenvectors() * binned.asDiagonal() * es.eigenvectors().transpose();
  out.prescale = op.prescale;
  out.spectral_radius = op.spectral_radius;
  return out;
}

Eigen::MatrixXd density_from_state(const DressedState& state) {
  const Eigen::VectorXd xhat = state.amps.head(state.d + 1);
  return xhat * xhat.transpose();
}

Eigen::MatrixXcd qpca_step(const Eigen::MatrixXcd& sigma,
                           const Eigen::MatrixXcd& rho,
                           const Eigen::MatrixXd& M, double dt) {
  require_density(sigma, "qpca_step sigma");
  require_density(rho, "qpca_step rho");
  const int head = static_cast<int>(sigma.rows());
  Eigen::MatrixXcd joint = sigma;
  while (joint.rows() < M.rows()) joint = kron_cx(joint, rho);
  if (joint.rows() != M.rows())
    throw std::invalid_argument("qpca_step: M side is not a power of the subsystem side");
  const Eigen::MatrixXcd u = hermitian_exp(M, dt);
  return trace_out_tail(u * joint * u.adjoint(), head);
}

Eigen::MatrixXcd qpca_evolve(const Eigen::MatrixXd& rho_X,
                             const PolynomialProblem& problem, double t, int m) {
  if (m < 1) throw std::invalid_argument("qpca_evolve: m must be >= 1");
  const Eigen::MatrixXd M = build_M(problem);
  const double dt = t / static_cast<double>(m);
  const Eigen::MatrixXcd u = hermitian_exp(M, dt);
  const Eigen::MatrixXcd rho = rho_X.cast<cx>();
  require_density(rho, "qpca_evolve rho_X");
  const int head = static_cast<int>(rho_X.rows());
  Eigen::MatrixXcd sigma = rho;
  for (int step = 0; step < m; ++step) {
    Eigen::MatrixXcd joint = sigma;
    while (joint.rows() < M.rows()) joint = kron_cx(joint, rho);
    sigma = trace_out_tail(u * joint * u.adjoint(), head);
  }
  return sigma;
}

double qpca_copy_count(const PolynomialProblem& problem, double eps_pca) {
  const double pi = std::numbers::pi;
  const double amax = problem.A.cwiseAbs().maxCoeff();
  return 4.0 * pi * pi * problem.p * problem.p * amax / eps_pca;
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Eigen::MatrixXcd diff = a - b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qgrad

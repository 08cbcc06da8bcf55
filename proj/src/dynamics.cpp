#include "neass/dynamics.hpp"

#include "neass/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace neass {

namespace {

// Commutator-free fourth-order scheme with Gauss nodes.
const double kSqrt3 = std::sqrt(3.0);
const double kC1 = 0.5 - kSqrt3 / 6.0;
const double kC2 = 0.5 + kSqrt3 / 6.0;
const double kA1 = 0.25 - kSqrt3 / 6.0;
const double kA2 = 0.25 + kSqrt3 / 6.0;

using Blocks = std::vector<std::vector<Eigen::Index>>;

struct BlockUnitary {
  std::vector<Matrix> u;

  static BlockUnitary identity(const Blocks& blocks) {
    BlockUnitary out;
    for (const auto& b : blocks) out.u.push_back(Matrix::Identity(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b.size())));
    return out;
  }

  void left_multiply(const BlockUnitary& e) {
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = e.u[i] * u[i];
  }

  Matrix dense(const Blocks& blocks, Eigen::Index dim) const {
    Matrix out = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < blocks.size(); ++i) out(blocks[i], blocks[i]) = u[i];
    return out;
  }

  Vector apply(const Blocks& blocks, const Vector& psi) const {
    Vector out = Vector::Zero(psi.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) out(blocks[i]) = u[i] * psi(blocks[i]);
    return out;
  }
};

std::vector<Matrix> blocks_at(const DriveSpec& drive, const Blocks& blocks, double t) {
  if (drive.block_hamiltonian) return drive.block_hamiltonian(t);
  const Matrix h = drive.hamiltonian(t);
  std::vector<Matrix> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(h(b, b));
  return out;
}

BlockUnitary block_exp(const std::vector<Matrix>& h, cplx c) {
  BlockUnitary out;
  out.u.reserve(h.size());
  for (const auto& m : h) out.u.push_back(expm_hermitian(m, c));
  return out;
}

BlockUnitary block_exp(const std::vector<Matrix>& h1, double w1, const std::vector<Matrix>& h2, double w2, cplx c) {
  BlockUnitary out;
  out.u.reserve(h1.size());
  for (std::size_t i = 0; i < h1.size(); ++i) out.u.push_back(expm_hermitian(w1 * h1[i] + w2 * h2[i], c));
  return out;
}

BlockUnitary cf4_run(const DriveSpec& drive, const Blocks& blocks, double a, double b, double eta, std::size_t n) {
  BlockUnitary u = BlockUnitary::identity(blocks);
  const double h = (b - a) / static_cast<double>(n);
  const cplx c(0.0, -h / eta);
  for (std::size_t k = 0; k < n; ++k) {
    const double ts = a + h * static_cast<double>(k);
    const auto h1 = blocks_at(drive, blocks, ts + kC1 * h);
    const auto h2 = blocks_at(drive, blocks, ts + kC2 * h);
    u.left_multiply(block_exp(h1, kA2, h2, kA1, c));
    u.left_multiply(block_exp(h1, kA1, h2, kA2, c));
  }
  return u;
}

double unitarity_defect(const BlockUnitary& u) {
  double worst = 0.0;
  for (const auto& m : u.u)
    worst = std::max(worst, max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())));
  return worst;
}

}  // namespace

Propagator propagate(const DriveSpec& drive, double t0, double t, double eta, const StepControl& control) {
  if (!(eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "eta must be positive");
  const Matrix h_start = drive.hamiltonian(t0);
  const Eigen::Index dim = h_start.rows();
  Blocks blocks = drive.blocks;
  if (blocks.empty()) {
    blocks.emplace_back(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) blocks[0][static_cast<std::size_t>(i)] = i;
  }

  Propagator out;
  out.t0 = t0;
  out.t = t;
  out.eta = eta;
  BlockUnitary total = BlockUnitary::identity(blocks);
  if (t == t0) {
    out.U = total.dense(blocks, dim);
    return out;
  }

  Vector psi = drive.reference.size() == dim ? drive.reference
                                             : diagonalize(h_start, {.require_simple = false}).ground_vector();

  // split at switching breakpoints so that constant stretches are exact
  std::vector<double> cuts{t0};
  const double lo = std::min(t0, t), hi = std::max(t0, t);
  for (double x : drive.breakpoints)
    if (x > lo && x < hi) cuts.push_back(x);
  if (t < t0) std::sort(cuts.begin() + 1, cuts.end(), std::greater<>());
  else std::sort(cuts.begin() + 1, cuts.end());
  cuts.push_back(t);

  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1];
    if (a == b) continue;
    BlockUnitary piece;
    if (drive.constant_on && drive.constant_on(std::min(a, b), std::max(a, b))) {
      piece = block_exp(blocks_at(drive, blocks, 0.5 * (a + b)), cplx(0.0, -(b - a) / eta));
      ++out.stats.exact_pieces;
    } else {
      const double scale = operator_norm(drive.hamiltonian(0.5 * (a + b)));
      const double phase = std::abs(b - a) * scale / eta;
      std::size_t n = std::max<std::size_t>(control.min_steps,
                                            static_cast<std::size_t>(std::ceil(phase * control.steps_per_phase)));
      if (n > control.max_steps) throw Error(ErrorCode::StepLimitExceeded, "initial step count above cap");
      BlockUnitary coarse = cf4_run(drive, blocks, a, b, eta, n);
      for (;;) {
        if (2 * n > control.max_steps)
          throw Error(ErrorCode::StepLimitExceeded, "self-consistency not reached within " +
                                                        std::to_string(control.max_steps) + " steps");
        BlockUnitary fine = cf4_run(drive, blocks, a, b, eta, 2 * n);
        const cplx zc = psi.dot(coarse.apply(blocks, psi));
        const cplx zf = psi.dot(fine.apply(blocks, psi));
        const double rel = std::abs(zc - zf) / std::max(std::abs(zf), 1e-300);
        n *= 2;
        coarse = std::move(fine);
        if (rel <= control.tolerance) {
          out.stats.self_consistency = std::max(out.stats.self_consistency, rel);
          break;
        }
      }
      out.stats.steps += n;
      piece = std::move(coarse);
    }
    psi = piece.apply(blocks, psi);
    total.left_multiply(piece);
  }

  out.stats.unitarity_defect = unitarity_defect(total);
  if (out.stats.unitarity_defect > control.unitarity_tolerance)
    throw Error(ErrorCode::UnitarityLost, "unitarity defect " + std::to_string(out.stats.unitarity_defect));
  out.U = total.dense(blocks, dim);
  return out;
}

Propagator propagate(const TimeDependentHamiltonian& h, double eps, double t0, double t, double eta,
                     const StepControl& control, const Vector& reference) {
  DriveSpec drive;
  drive.reference = reference;
  drive.hamiltonian = [&h, eps](double s) { return h.h_eps(s, eps); };
  drive.constant_on = [&h](double a, double b) { return h.constant_on(a, b); };
  drive.breakpoints = h.breakpoints();
  drive.blocks = h.space().number_sectors();
  drive.blocks.erase(std::remove_if(drive.blocks.begin(), drive.blocks.end(), [](const auto& b) { return b.empty(); }),
                     drive.blocks.end());

  // Restrict each component once; H(t) per block is then a short weighted sum.
  struct Piece {
    const Switching* profile;
    double weight;
    std::vector<Matrix> blocks;
  };
  auto pieces = std::make_shared<std::vector<Piece>>();
  for (std::size_t c = 0; c < h.h0_components().size(); ++c) {
    Piece p{&h.h0_components()[c].profile, 1.0, {}};
    const Matrix& m = h.h0_matrix(c);
    for (const auto& b : drive.blocks) p.blocks.push_back(m(b, b));
    pieces->push_back(std::move(p));
  }
  for (std::size_t c = 0; c < h.v_components().size(); ++c) {
    Piece p{&h.v_components()[c].profile, eps, {}};
    const Matrix& m = h.v_matrix(c);
    for (const auto& b : drive.blocks) p.blocks.push_back(m(b, b));
    pieces->push_back(std::move(p));
  }
  drive.block_hamiltonian = [pieces, sizes = drive.blocks](double s) {
    std::vector<Matrix> out;
    out.reserve(sizes.size());
    for (const auto& b : sizes)
      out.push_back(Matrix::Zero(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b.size())));
    for (const auto& p : *pieces) {
      const double f = p.weight * evaluate(*p.profile, s, 0);
      if (f == 0.0) continue;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += f * p.blocks[i];
    }
    return out;
  };
  return propagate(drive, t0, t, eta, control);
}

Matrix heisenberg_evolve(const Propagator& p, const Matrix& a) {
  if (a.rows() != p.U.rows() || a.cols() != p.U.cols()) throw Error(ErrorCode::ShapeMismatch, "observable shape");
  return p.U.adjoint() * a * p.U;
}

Matrix static_evolve(const Matrix& h, double s, const Matrix& a) {
  if (a.rows() != h.rows() || a.cols() != h.cols()) throw Error(ErrorCode::ShapeMismatch, "observable shape");
  if (s == 0.0) return a;
  const Matrix u = expm_hermitian(h, cplx(0.0, -s));
  return u.adjoint() * a * u;
}

}  // namespace neass

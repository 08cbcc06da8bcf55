#include "neass/fock.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace neass {

namespace {

using Bits = std::uint64_t;

inline int popcount(Bits b) { return std::popcount(b); }

/// Mode positions of `sub` inside `big`, in increasing order.
std::vector<int> mode_positions(const FockSpace& sub, const FockSpace& big) {
  std::vector<int> pos;
  pos.reserve(static_cast<std::size_t>(sub.modes()));
  for (std::size_t s : sub.sites())
    for (int i = 0; i < sub.orbitals(); ++i) pos.push_back(big.mode(s, i));
  return pos;
}

/// Sign bookkeeping for the graded factorization 𝔉_big ≅ 𝔉_X ⊗ 𝔉_rest.
/// For a big basis state b the parity of the number of pairs (z, x) with z
/// outside X occupied, x in X occupied and x < z.
class GradedSplit {
 public:
  GradedSplit(const FockSpace& sub, const FockSpace& big)
      : positions_(mode_positions(sub, big)), big_modes_(big.modes()) {
    for (int p : positions_) x_mask_ |= Bits{1} << p;
  }

  Bits x_mask() const noexcept { return x_mask_; }
  Bits rest_mask() const noexcept { return ((Bits{1} << big_modes_) - 1) & ~x_mask_; }

  Bits gather(Bits b) const noexcept {
    Bits out = 0;
    for (std::size_t k = 0; k < positions_.size(); ++k)
      if (b >> positions_[k] & 1U) out |= Bits{1} << k;
    return out;
  }

  Bits scatter(Bits local) const noexcept {
    Bits out = 0;
    for (std::size_t k = 0; k < positions_.size(); ++k)
      if (local >> k & 1U) out |= Bits{1} << positions_[k];
    return out;
  }

  int sign(Bits b) const noexcept {
    int inversions = 0;
    Bits rest = b & rest_mask();
    while (rest) {
      const int z = std::countr_zero(rest);
      rest &= rest - 1;
      inversions += popcount(b & x_mask_ & ((Bits{1} << z) - 1));
    }
    return (inversions & 1) ? -1 : 1;
  }

 private:
  std::vector<int> positions_;
  int big_modes_;
  Bits x_mask_ = 0;
};

}  // namespace

FockSpace::FockSpace(std::shared_ptr<const Lattice> lattice, int orbitals,
                     std::vector<std::size_t> sites, FockCap cap)
    : lattice_(std::move(lattice)), orbitals_(orbitals), sites_(std::move(sites)) {
  if (!lattice_) throw Error(ErrorCode::InvalidArgument, "null lattice");
  if (orbitals_ < 1) throw Error(ErrorCode::InvalidArgument, "orbitals must be >= 1");
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  for (std::size_t s : sites_)
    if (s >= lattice_->size()) throw Error(ErrorCode::SiteOutOfRange, "site " + std::to_string(s));
  if (static_cast<std::size_t>(modes()) > cap.max_modes)
    throw Error(ErrorCode::DimensionTooLarge,
                std::to_string(modes()) + " modes exceed cap of " + std::to_string(cap.max_modes));
}

FockSpace FockSpace::full(std::shared_ptr<const Lattice> lattice, int orbitals, FockCap cap) {
  std::vector<std::size_t> all(lattice->size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return FockSpace(std::move(lattice), orbitals, std::move(all), cap);
}

bool FockSpace::contains_site(std::size_t site) const noexcept {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

bool FockSpace::contains(const FockSpace& other) const noexcept {
  if (other.lattice_.get() != lattice_.get() || other.orbitals_ != orbitals_) return false;
  return std::includes(sites_.begin(), sites_.end(), other.sites_.begin(), other.sites_.end());
}

bool FockSpace::same_as(const FockSpace& other) const noexcept {
  return other.lattice_.get() == lattice_.get() && other.orbitals_ == orbitals_ &&
         other.sites_ == sites_;
}

int FockSpace::mode(std::size_t site, int orbital) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), site);
  if (it == sites_.end() || *it != site || orbital < 0 || orbital >= orbitals_)
    throw Error(ErrorCode::ModeOutOfRange,
                "mode (" + std::to_string(site) + "," + std::to_string(orbital) + ")");
  return static_cast<int>(it - sites_.begin()) * orbitals_ + orbital;
}

std::vector<int> FockSpace::particle_numbers() const {
  std::vector<int> n(static_cast<std::size_t>(dim()));
  for (Eigen::Index b = 0; b < dim(); ++b) n[static_cast<std::size_t>(b)] = popcount(static_cast<Bits>(b));
  return n;
}

Matrix FockSpace::number_operator() const {
  Matrix m = Matrix::Zero(dim(), dim());
  for (Eigen::Index b = 0; b < dim(); ++b) m(b, b) = popcount(static_cast<Bits>(b));
  return m;
}

Matrix FockSpace::parity_operator() const {
  Matrix m = Matrix::Zero(dim(), dim());
  for (Eigen::Index b = 0; b < dim(); ++b) m(b, b) = (popcount(static_cast<Bits>(b)) & 1) ? -1.0 : 1.0;
  return m;
}

Matrix FockSpace::identity() const { return Matrix::Identity(dim(), dim()); }

std::vector<std::vector<Eigen::Index>> FockSpace::number_sectors() const {
  std::vector<std::vector<Eigen::Index>> sectors(static_cast<std::size_t>(modes()) + 1);
  for (Eigen::Index b = 0; b < dim(); ++b)
    sectors[static_cast<std::size_t>(popcount(static_cast<Bits>(b)))].push_back(b);
  return sectors;
}

OperatorFlags classify(const FockSpace& space, const Matrix& m, double tol) {
  OperatorFlags f;
  const double scale = max_abs(m);
  const double bound = tol * std::max(scale, 1e-300);
  f.self_adjoint = (m - m.adjoint()).norm() <= tol * std::max(m.norm(), 1e-300) || scale == 0.0;
  double odd = 0.0;
  double nonconserving = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double a = std::abs(m(i, j));
      if (a == 0.0) continue;
      const int ni = popcount(static_cast<Bits>(i));
      const int nj = popcount(static_cast<Bits>(j));
      if ((ni ^ nj) & 1) odd = std::max(odd, a);
      if (ni != nj) nonconserving = std::max(nonconserving, a);
    }
  }
  f.even = odd <= bound;
  f.number_conserving = nonconserving <= bound;
  (void)space;
  return f;
}

LocalOperator::LocalOperator(FockSpace space, Matrix matrix)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim())
    throw Error(ErrorCode::ShapeMismatch, "matrix does not match Fock dimension");
  flags_ = classify(space_, matrix_);
}

LocalOperator LocalOperator::adjoint() const { return LocalOperator(space_, matrix_.adjoint()); }

LocalOperator creation_op(const FockSpace& space, std::size_t site, int orbital) {
  const int m = space.mode(site, orbital);
  const Eigen::Index dim = space.dim();
  Matrix a = Matrix::Zero(dim, dim);
  const Bits bit = Bits{1} << m;
  for (Eigen::Index b = 0; b < dim; ++b) {
    const Bits state = static_cast<Bits>(b);
    if (state & bit) continue;
    const int sign = (popcount(state & (bit - 1)) & 1) ? -1 : 1;
    a(static_cast<Eigen::Index>(state | bit), b) = sign;
  }
  return LocalOperator(space, std::move(a));
}

LocalOperator annihilation_op(const FockSpace& space, std::size_t site, int orbital) {
  return creation_op(space, site, orbital).adjoint();
}

std::vector<Matrix> annihilators(const FockSpace& space) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(space.modes()));
  for (std::size_t s : space.sites())
    for (int i = 0; i < space.orbitals(); ++i)
      out.push_back(annihilation_op(space, s, i).matrix());
  return out;
}

LocalOperator embed_local(const LocalOperator& op, const FockSpace& big) {
  if (!big.contains(op.space()))
    throw Error(ErrorCode::SupportNotContained, "operator support not inside target space");
  if (!op.flags().even)
    throw Error(ErrorCode::OddOperatorEmbedding, "only even operators can be embedded");
  if (big.same_as(op.space())) return op;

  const GradedSplit split(op.space(), big);
  const Matrix& a = op.matrix();
  const Eigen::Index dim = big.dim();
  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Bits b = static_cast<Bits>(col);
    const Bits rest = b & split.rest_mask();
    const Eigen::Index local_col = static_cast<Eigen::Index>(split.gather(b));
    const int sign_col = split.sign(b);
    for (Eigen::Index local_row = 0; local_row < a.rows(); ++local_row) {
      const cplx v = a(local_row, local_col);
      if (v == cplx{0.0, 0.0}) continue;
      const Bits row = rest | split.scatter(static_cast<Bits>(local_row));
      out(static_cast<Eigen::Index>(row), col) = v * static_cast<double>(sign_col * split.sign(row));
    }
  }
  return LocalOperator(big, std::move(out));
}

LocalOperator reduce_to(const LocalOperator& op, const FockSpace& sub) {
  if (!op.space().contains(sub))
    throw Error(ErrorCode::SupportNotContained, "sub-space not inside operator space");
  if (!op.flags().even) throw Error(ErrorCode::OddOperatorInput, "conditional expectation needs even input");
  if (sub.same_as(op.space())) return op;

  const GradedSplit split(sub, op.space());
  const Matrix& a = op.matrix();
  const Eigen::Index local_dim = sub.dim();
  Matrix reduced = Matrix::Zero(local_dim, local_dim);
  const Bits rest_mask = split.rest_mask();
  const int rest_modes = op.space().modes() - sub.modes();
  // Enumerate rest configurations as sub-masks of rest_mask.
  Bits rest = 0;
  do {
    for (Eigen::Index lc = 0; lc < local_dim; ++lc) {
      const Bits col = rest | split.scatter(static_cast<Bits>(lc));
      const int sc = split.sign(col);
      for (Eigen::Index lr = 0; lr < local_dim; ++lr) {
        const Bits row = rest | split.scatter(static_cast<Bits>(lr));
        reduced(lr, lc) += a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) *
                           static_cast<double>(sc * split.sign(row));
      }
    }
    rest = (rest - rest_mask) & rest_mask;
  } while (rest != 0);
  reduced /= static_cast<double>(Bits{1} << rest_modes);
  // input is even; drop the rounding noise in the odd blocks so a small reduced
  // operator is not misread as odd
  for (Eigen::Index j = 0; j < local_dim; ++j)
    for (Eigen::Index i = 0; i < local_dim; ++i)
      if ((popcount(static_cast<Bits>(i)) ^ popcount(static_cast<Bits>(j))) & 1) reduced(i, j) = 0.0;
  return LocalOperator(sub, std::move(reduced));
}

LocalOperator conditional_expectation(const LocalOperator& op, const std::vector<std::size_t>& keep) {
  std::vector<std::size_t> sites;
  for (std::size_t s : keep)
    if (op.space().contains_site(s)) sites.push_back(s);
  const FockSpace sub(op.space().lattice_ptr(), op.space().orbitals(), std::move(sites));
  return embed_local(reduce_to(op, sub), op.space());
}

LocalOperator conditional_expectation(const LocalOperator& op, int sub_box_radius) {
  return conditional_expectation(op, op.space().lattice().sub_box(sub_box_radius));
}

std::vector<std::pair<int, double>> locality_profile(const LocalOperator& op,
                                                     const std::vector<int>& l_values) {
  std::vector<std::pair<int, double>> out;
  out.reserve(l_values.size());
  for (int l : l_values) {
    const LocalOperator e = conditional_expectation(op, l);
    out.emplace_back(l, operator_norm(op.matrix() - e.matrix()));
  }
  return out;
}

Matrix random_even_matrix(const FockSpace& space, std::mt19937_64& rng, bool hermitian) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index dim = space.dim();
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      if (((popcount(static_cast<Bits>(i)) ^ popcount(static_cast<Bits>(j))) & 1) == 0)
        m(i, j) = cplx{re, im};
    }
  if (hermitian) m = (0.5 * (m + m.adjoint())).eval();
  const double n = operator_norm(m);
  if (n > 0.0) m /= n;
  return m;
}

Matrix random_local_even_matrix(const FockSpace& big, std::size_t window, std::mt19937_64& rng) {
  const auto& sites = big.sites();
  window = std::min(window, sites.size());
  std::uniform_int_distribution<std::size_t> pick(0, sites.size() - window);
  const std::size_t start = pick(rng);
  std::vector<std::size_t> chosen(sites.begin() + static_cast<std::ptrdiff_t>(start),
                                  sites.begin() + static_cast<std::ptrdiff_t>(start + window));
  const FockSpace local(big.lattice_ptr(), big.orbitals(), std::move(chosen));
  const LocalOperator op(local, random_even_matrix(local, rng, false));
  return embed_local(op, big).matrix();
}

}  // namespace neass

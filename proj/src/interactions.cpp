#include "neass/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace neass {

namespace {

Matrix zero_if_empty(const Matrix& m, int r) {
  return m.size() == 0 ? Matrix::Zero(r, r) : m;
}

std::vector<Site> coordinates(const Lattice& lattice, const std::vector<std::size_t>& sites) {
  std::vector<Site> out;
  out.reserve(sites.size());
  for (std::size_t s : sites) out.push_back(lattice.site(s));
  return out;
}

/// Terms as (coordinate support → matrix) so interactions on different boxes compare.
std::map<std::vector<Site>, Matrix> by_coordinates(const Interaction& phi) {
  std::map<std::vector<Site>, Matrix> out;
  for (const auto& [support, op] : phi.terms())
    out.emplace(coordinates(phi.lattice(), support), op.matrix());
  return out;
}

int l1(const Site& a, const Site& b) { return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]); }

double diam_power(int diameter, int n) {
  if (n == 0) return 1.0;
  return std::pow(static_cast<double>(diameter), n);
}

}  // namespace

Interaction::Interaction(std::shared_ptr<const Lattice> lattice, int orbitals)
    : lattice_(std::move(lattice)), orbitals_(orbitals) {
  if (!lattice_) throw Error(ErrorCode::InvalidArgument, "null lattice");
}

void Interaction::add(const LocalOperator& op) {
  if (&op.space().lattice() != lattice_.get() || op.space().orbitals() != orbitals_)
    throw Error(ErrorCode::SupportNotContained, "term built on a different lattice");
  const auto& f = op.flags();
  if (!f.self_adjoint || !f.even || !f.number_conserving)
    throw Error(ErrorCode::InvalidArgument,
                "interaction terms must be self-adjoint, even and number-conserving");
  auto it = terms_.find(op.support());
  if (it == terms_.end()) {
    terms_.emplace(op.support(), op);
  } else {
    it->second = LocalOperator(op.space(), it->second.matrix() + op.matrix());
  }
}

Interaction Interaction::scaled(double factor) const {
  Interaction out(lattice_, orbitals_);
  for (const auto& [support, op] : terms_) out.terms_.emplace(support, LocalOperator(op.space(), factor * op.matrix()));
  return out;
}

Interaction Interaction::operator+(const Interaction& other) const {
  Interaction out = *this;
  for (const auto& [support, op] : other.terms_) out.add(op);
  return out;
}

Interaction Interaction::operator-(const Interaction& other) const { return *this + other.scaled(-1.0); }

Interaction Interaction::restricted_to(const std::vector<std::size_t>& sites) const {
  std::vector<std::size_t> sorted = sites;
  std::sort(sorted.begin(), sorted.end());
  Interaction out(lattice_, orbitals_);
  for (const auto& [support, op] : terms_)
    if (std::includes(sorted.begin(), sorted.end(), support.begin(), support.end()))
      out.terms_.emplace(support, op);
  return out;
}

Matrix ModelParams::onsite_at(const Site& s) const {
  Matrix phi = zero_if_empty(onsite_uniform, orbitals);
  if (onsite_staggered.size() != 0) {
    const int parity = ((s[0] + s[1]) % 2 + 2) % 2;
    phi += (parity == 0 ? 1.0 : -1.0) * onsite_staggered;
  }
  if (auto it = onsite_site.find(s); it != onsite_site.end()) phi += it->second;
  return phi;
}

void ModelParams::complete_hopping() {
  std::map<Site, Matrix> completed = hopping;
  for (const auto& [d, t] : hopping) {
    if (t.rows() != orbitals || t.cols() != orbitals)
      throw Error(ErrorCode::ShapeMismatch, "hopping matrix must be r×r");
    const Site minus{-d[0], -d[1]};
    auto it = hopping.find(minus);
    if (it == hopping.end()) {
      completed[minus] = t.adjoint();
    } else if (max_abs(it->second - t.adjoint()) > 1e-12 * std::max(1.0, max_abs(t))) {
      throw Error(ErrorCode::NonHermitianHopping, "T(-x) != T(x)^* for x = (" + std::to_string(d[0]) +
                                                      "," + std::to_string(d[1]) + ")");
    }
  }
  hopping = std::move(completed);
}

Interaction build_example_hamiltonian(std::shared_ptr<const Lattice> lattice, ModelParams params) {
  params.complete_hopping();
  const int r = params.orbitals;
  const Lattice& lat = *lattice;
  Interaction phi(lattice, r);

  for (const auto& [d, w] : params.density)
    if (!is_hermitian(w, 1e-12)) throw Error(ErrorCode::InvalidArgument, "W must be Hermitian");

  // Single-site terms: φ(x), T(0), W(0), −μ N_x.
  for (std::size_t x = 0; x < lat.size(); ++x) {
    const FockSpace space(lattice, r, {x});
    const auto a = annihilators(space);
    Matrix one_body = params.onsite_at(lat.site(x));
    if (auto it = params.hopping.find(Site{0, 0}); it != params.hopping.end()) one_body += it->second;
    one_body -= params.mu * Matrix::Identity(r, r);
    if (!is_hermitian(one_body, 1e-12)) throw Error(ErrorCode::InvalidArgument, "on-site matrix not Hermitian");

    Matrix term = Matrix::Zero(space.dim(), space.dim());
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j)
        if (one_body(i, j) != cplx{0.0, 0.0}) term += one_body(i, j) * a[i].adjoint() * a[j];
    if (auto it = params.density.find(0); it != params.density.end()) {
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
          term += it->second(i, j) * (a[i].adjoint() * a[i]) * (a[j].adjoint() * a[j]);
    }
    if (max_abs(term) > 0.0) phi.add(LocalOperator(space, term));
  }

  // Pair terms: hopping grouped per unordered pair, and density-density.
  for (std::size_t x = 0; x < lat.size(); ++x) {
    for (std::size_t y = x + 1; y < lat.size(); ++y) {
      const Site dxy = lat.displacement(x, y);
      const Site dyx = lat.displacement(y, x);
      auto txy = params.hopping.find(dxy);
      auto tyx = params.hopping.find(dyx);
      auto w = params.density.find(lat.distance(x, y));
      if (txy == params.hopping.end() && w == params.density.end()) continue;

      const FockSpace space(lattice, r, {x, y});
      const auto a = annihilators(space);
      // modes 0..r-1 belong to x (smaller index), r..2r-1 to y
      Matrix term = Matrix::Zero(space.dim(), space.dim());
      if (txy != params.hopping.end()) {
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) {
            term += txy->second(i, j) * a[i].adjoint() * a[r + j];
            term += tyx->second(i, j) * a[r + i].adjoint() * a[j];
          }
      }
      if (w != params.density.end()) {
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) {
            const Matrix nx = a[i].adjoint() * a[i];
            const Matrix ny = a[r + j].adjoint() * a[r + j];
            term += (w->second(i, j) + w->second(j, i)) * nx * ny;
          }
      }
      if (max_abs(term) > 0.0) phi.add(LocalOperator(space, term));
    }
  }
  return phi;
}

LocalOperator assemble_operator(const Interaction& phi, const FockSpace& space) {
  Matrix total = Matrix::Zero(space.dim(), space.dim());
  for (const auto& [support, op] : phi.terms()) total += embed_local(op, space).matrix();
  return LocalOperator(space, std::move(total));
}

std::map<std::vector<std::size_t>, double> term_norms(const Interaction& phi) {
  std::map<std::vector<std::size_t>, double> out;
  for (const auto& [support, op] : phi.terms()) out.emplace(support, operator_norm(op.matrix()));
  return out;
}

double interaction_norm(const Interaction& phi, double a, int n) {
  const Lattice& lat = phi.lattice();
  const std::size_t sites = lat.size();
  std::vector<double> table(sites * sites, 0.0);
  for (const auto& [support, norm] : term_norms(phi)) {
    const double weight = diam_power(lat.diameter(support), n) * norm;
    for (std::size_t x : support)
      for (std::size_t y : support) table[x * sites + y] += weight * std::exp(a * lat.distance(x, y));
  }
  return table.empty() ? 0.0 : *std::max_element(table.begin(), table.end());
}

double interaction_norm(const std::vector<Interaction>& family, double a, int n) {
  double sup = 0.0;
  for (const auto& phi : family) sup = std::max(sup, interaction_norm(phi, a, n));
  return sup;
}

double bulk_interaction_norm(const Interaction& phi, double a, int n, int sub_box_radius) {
  const Lattice& lat = phi.lattice();
  if (sub_box_radius > lat.radius())
    throw Error(ErrorCode::SubBoxTooLarge, "Λ_M larger than the box");
  const Interaction inner = phi.restricted_to(lat.sub_box(sub_box_radius));
  const std::size_t sites = lat.size();
  std::vector<double> table(sites * sites, 0.0);
  for (const auto& [support, norm] : term_norms(inner)) {
    const double weight = diam_power(lat.l1_diameter(support), n) * norm;
    for (std::size_t x : support)
      for (std::size_t y : support) table[x * sites + y] += weight * std::exp(a * lat.l1_distance(x, y));
  }
  return table.empty() ? 0.0 : *std::max_element(table.begin(), table.end());
}

LipschitzPotential LipschitzPotential::linear(std::shared_ptr<const Lattice> lattice, double slope) {
  LipschitzPotential v{lattice, {}};
  for (const Site& s : lattice->sites()) v.values.push_back(slope * s[0]);
  return v;
}

LipschitzPotential LipschitzPotential::sine(std::shared_ptr<const Lattice> lattice, double amplitude) {
  LipschitzPotential v{lattice, {}};
  const double side = 2.0 * lattice->radius() + 1.0;
  for (const Site& s : lattice->sites())
    v.values.push_back(amplitude * std::sin(2.0 * std::numbers::pi * s[0] / side));
  return v;
}

Interaction LipschitzPotential::to_interaction(int orbitals) const {
  Interaction phi(lattice, orbitals);
  for (std::size_t x = 0; x < values.size(); ++x) {
    if (values[x] == 0.0) continue;
    const FockSpace space(lattice, orbitals, {x});
    phi.add(LocalOperator(space, values[x] * space.number_operator()));
  }
  return phi;
}

namespace {

template <class Metric>
double lipschitz_with(const LipschitzPotential& v, Metric metric) {
  double c = 0.0;
  for (std::size_t x = 0; x < v.values.size(); ++x)
    for (std::size_t y = x + 1; y < v.values.size(); ++y)
      c = std::max(c, std::abs(v.values[x] - v.values[y]) / metric(x, y));
  return c;
}

}  // namespace

double lipschitz_constant(const LipschitzPotential& v) {
  return lipschitz_with(v, [&](std::size_t x, std::size_t y) { return double(v.lattice->distance(x, y)); });
}

double lipschitz_constant_l1(const LipschitzPotential& v) {
  return lipschitz_with(v, [&](std::size_t x, std::size_t y) { return double(v.lattice->l1_distance(x, y)); });
}

std::string lipschitz_warning(const LipschitzPotential& v, double bound) {
  const double c = lipschitz_constant(v);
  if (c <= bound) return {};
  std::ostringstream os;
  os << "Lipschitz constant " << c << " exceeds bound " << bound << " on " << to_string(v.lattice->boundary())
     << " lattice (C_v° = " << lipschitz_constant_l1(v) << ")";
  return os.str();
}

std::vector<TdlRow> tdl_diagnostic(const std::vector<Interaction>& family, const Interaction& reference,
                                   double a, int n, const std::vector<int>& m_values) {
  const auto ref_terms = by_coordinates(reference);
  std::vector<TdlRow> rows;
  for (const auto& phi : family) {
    const int k = phi.lattice().radius();
    const auto terms = by_coordinates(phi);
    for (int M : m_values) {
      if (M > k || M > reference.lattice().radius()) continue;
      auto inside = [M](const std::vector<Site>& xs) {
        return std::all_of(xs.begin(), xs.end(),
                           [M](const Site& s) { return std::abs(s[0]) <= M && std::abs(s[1]) <= M; });
      };
      // Difference Ψ(X) − Φ^{Λ_k}(X) over supports X ⊂ Λ_M from either side.
      std::map<std::vector<Site>, Matrix> diff;
      for (const auto& [xs, m] : ref_terms)
        if (inside(xs)) diff[xs] = m;
      for (const auto& [xs, m] : terms) {
        if (!inside(xs)) continue;
        auto it = diff.find(xs);
        if (it == diff.end()) diff.emplace(xs, -m);
        else it->second -= m;
      }
      std::map<std::pair<Site, Site>, double> table;
      for (const auto& [xs, m] : diff) {
        int diameter = 0;
        for (const Site& p : xs)
          for (const Site& q : xs) diameter = std::max(diameter, l1(p, q));
        const double weight = diam_power(diameter, n) * operator_norm(m);
        for (const Site& p : xs)
          for (const Site& q : xs) table[{p, q}] += weight * std::exp(a * l1(p, q));
      }
      double value = 0.0;
      for (const auto& [pair, v] : table) value = std::max(value, v);
      rows.push_back({k, M, value});
    }
  }
  return rows;
}

TimeDependentHamiltonian::TimeDependentHamiltonian(FockSpace space, std::vector<Component> h0,
                                                   std::vector<Component> v)
    : space_(std::move(space)), h0_(std::move(h0)), v_(std::move(v)) {
  for (const auto& c : h0_) h0_mats_.push_back(assemble_operator(c.interaction, space_).matrix());
  for (const auto& c : v_) v_mats_.push_back(assemble_operator(c.interaction, space_).matrix());
}

Matrix TimeDependentHamiltonian::h0(double t, int order) const {
  Matrix out = Matrix::Zero(space_.dim(), space_.dim());
  for (std::size_t c = 0; c < h0_.size(); ++c) {
    const double f = evaluate(h0_[c].profile, t, order);
    if (f != 0.0) out += f * h0_mats_[c];
  }
  return out;
}

Matrix TimeDependentHamiltonian::v(double t, int order) const {
  Matrix out = Matrix::Zero(space_.dim(), space_.dim());
  for (std::size_t c = 0; c < v_.size(); ++c) {
    const double f = evaluate(v_[c].profile, t, order);
    if (f != 0.0) out += f * v_mats_[c];
  }
  return out;
}

bool TimeDependentHamiltonian::stationary_at(double t) const {
  auto flat = [t](const std::vector<Component>& cs) {
    return std::all_of(cs.begin(), cs.end(), [t](const Component& c) {
      return evaluate(c.profile, t, 1) == 0.0 && evaluate(c.profile, t, 2) == 0.0;
    });
  };
  return flat(h0_) && flat(v_);
}

bool TimeDependentHamiltonian::constant_on(double a, double b) const {
  auto flat = [a, b](const std::vector<Component>& cs) {
    return std::all_of(cs.begin(), cs.end(), [a, b](const Component& c) { return neass::constant_on(c.profile, a, b); });
  };
  return flat(h0_) && flat(v_);
}

std::vector<double> TimeDependentHamiltonian::breakpoints() const {
  std::vector<double> out;
  for (const auto* cs : {&h0_, &v_})
    for (const auto& c : *cs)
      for (double x : neass::breakpoints(c.profile)) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace neass

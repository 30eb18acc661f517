#include "csplab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csplab/errors.hpp"
#include "csplab/kernels.hpp"

namespace csplab {

Rational psi_prob(std::size_t n, std::size_t m, std::size_t d, std::size_t k) {
  if (!(n >= m && m >= d)) throw ValidationError("psi_prob needs n >= m >= d >= 0");
  if (k == 0) throw ValidationError("psi_prob needs k >= 1");
  Rational p = 1;
  for (std::size_t i = 0; i < d; ++i) {
    BigInt power;
    mpz_ui_pow_ui(power.get_mpz_t(), static_cast<unsigned long>(n - i), static_cast<unsigned long>(k));
    p *= Rational(static_cast<unsigned long>(m - i)) / Rational(power);
  }
  return p;
}

CheckReport check_psi_containment(std::size_t n, std::size_t m, std::size_t k, std::size_t cap) {
  auto u = standard_universe(k, n);
  auto all = enumerate_matchings(u, m, cap);
  nlohmann::json rows = nlohmann::json::array();
  std::size_t mismatches = 0;
  for (std::size_t d = 0; d <= m; ++d) {
    Matching fixed;
    for (std::size_t t = 0; t < d; ++t) {
      HyperEdge e;
      for (std::size_t j = 0; j < k; ++j) e.push_back(u.parts[j][t]);
      fixed.push_back(e);
    }
    std::size_t hits = 0;
    for (const auto& mt : all) hits += std::includes(mt.begin(), mt.end(), fixed.begin(), fixed.end());
    Rational freq = make_rational(static_cast<long>(hits), static_cast<long>(all.size()));
    Rational psi = psi_prob(n, m, d, k);
    mismatches += freq != psi;
    rows.push_back({{"d", d}, {"psi", to_string(psi)}, {"frequency", to_string(freq)}});
  }
  CheckReport r;
  r.check = "psi_containment";
  r.params = {{"U", n}, {"m", m}, {"k", k}};
  r.certified = true;
  r.pass = mismatches == 0;
  r.worst_ratio = static_cast<double>(mismatches);
  r.details = {{"matchings", all.size()}, {"rows", rows}};
  return r;
}

LabeledMatchingSpace::LabeledMatchingSpace(KUniverse universe, std::size_t m, std::size_t N, std::size_t cap)
    : universe_(std::move(universe)), m_(m), N_(N) {
  universe_.validate();
  if (N_ == 0) throw ValidationError("space needs N >= 1");
  if (universe_.span() != universe_.k() * universe_.size())
    throw ValidationError("space universe must use the vertex ids 0..span-1");
  labelings_ = group_size(N_, universe_.k() * m_);
  seed_count_ = group_size(N_, universe_.span());
  if (matching_count(universe_.size(), universe_.k(), m_) * static_cast<unsigned long>(labelings_) > cap)
    throw CapExceeded("labeled matching space exceeds cap " + std::to_string(cap));
  matchings_ = enumerate_matchings(universe_, m_, cap);
  for (std::size_t i = 0; i < matchings_.size(); ++i) matching_index_[matchings_[i]] = i;
}

LabeledMatching LabeledMatchingSpace::at(std::size_t index) const {
  if (index >= size()) throw ValidationError("space index out of range");
  const auto& mt = matchings_[index / labelings_];
  auto flat = vector_at(index % labelings_, N_, k() * m_);
  LabeledMatching y;
  y.N = N_;
  y.m = m_;
  for (std::size_t t = 0; t < m_; ++t)
    y.edges.push_back({mt[t], Label(flat.begin() + t * k(), flat.begin() + (t + 1) * k())});
  return y;
}

std::size_t LabeledMatchingSpace::index_of(const LabeledMatching& y) const {
  auto it = matching_index_.find(y.support());
  if (it == matching_index_.end() || y.N != N_) throw ValidationError("labeled matching is not in the space");
  Label flat;
  for (const auto& le : y.edges) flat.insert(flat.end(), le.label.begin(), le.label.end());
  return it->second * labelings_ + vector_index(flat, N_);
}

void CharacterIndex::validate(const KUniverse& universe, std::size_t m, std::size_t N) const {
  if (edges.size() != labels.size()) throw ValidationError("character index needs one label per edge");
  if (edges.size() > m) throw ValidationError("character index has more edges than m");
  if (!std::is_sorted(edges.begin(), edges.end())) throw ValidationError("character edges must be sorted");
  if (!is_matching(universe, edges)) throw ValidationError("character edges do not form a matching");
  for (const auto& a : labels) {
    if (a.size() != universe.k()) throw ValidationError("character label length must equal k");
    if (std::all_of(a.begin(), a.end(), [](Residue r) { return r == 0; }))
      throw ValidationError("character labels must be nonzero");
    for (Residue r : a)
      if (r >= N) throw ValidationError("character label residue out of range");
  }
}

namespace {

Complex root_of_unity(std::size_t s, std::size_t N) {
  s %= N;
  // Exact values where they exist keep N = 2 and N = 4 free of rounding.
  if (s == 0) return {1, 0};
  if (2 * s == N) return {-1, 0};
  if (4 * s == N) return {0, 1};
  if (4 * s == 3 * N) return {0, -1};
  double angle = 2 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(N);
  return {std::cos(angle), std::sin(angle)};
}

std::size_t pairing(std::span<const Residue> a, std::span<const Residue> t, std::size_t N) {
  std::size_t s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s = (s + static_cast<std::size_t>(a[j]) * t[j]) % N;
  return s;
}

std::size_t support_size(std::span<const Residue> v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](Residue r) { return r != 0; }));
}

double squared_norm(const std::vector<Complex>& f) { return inner_product(f, f).real(); }

}  // namespace

Complex root_character(std::span<const Residue> a, std::span<const Residue> t, std::size_t N) {
  if (a.size() != t.size()) throw ValidationError("character and argument lengths differ");
  return root_of_unity(pairing(a, t, N), N);
}

Complex character_eval(const CharacterIndex& idx, const LabeledMatching& y, const KUniverse& universe, std::size_t m) {
  Complex value = 1.0 / std::sqrt(psi_prob(universe.size(), m, idx.edges.size(), universe.k()).get_d());
  for (std::size_t t = 0; t < idx.edges.size(); ++t) {
    const Label* label = y.find(idx.edges[t]);
    if (!label) return 0;
    value *= root_character(idx.labels[t], *label, y.N);
  }
  return value;
}

std::vector<CharacterIndex> character_indices(const KUniverse& universe, std::size_t m, std::size_t N,
                                              std::size_t max_d) {
  const std::size_t k = universe.k(), nonzero = group_size(N, k) - 1;
  std::vector<CharacterIndex> out;
  for (std::size_t d = 0; d <= std::min(max_d, m); ++d) {
    std::size_t choices = 1;
    for (std::size_t t = 0; t < d; ++t) choices *= nonzero;
    for (const auto& mt : enumerate_matchings(universe, d)) {
      for (std::size_t c = 0; c < choices; ++c) {
        CharacterIndex idx{mt, std::vector<Label>(d)};
        std::size_t rest = c;
        for (std::size_t t = d; t-- > 0;) {
          idx.labels[t] = vector_at(rest % nonzero + 1, N, k);
          rest /= nonzero;
        }
        out.push_back(std::move(idx));
      }
    }
  }
  return out;
}

std::vector<Complex> character_vector(const CharacterIndex& idx, const LabeledMatchingSpace& space) {
  idx.validate(space.universe(), space.m(), space.N());
  std::vector<Complex> out(space.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = character_eval(idx, space.at(i), space.universe(), space.m());
  return out;
}

Complex inner_product(const std::vector<Complex>& f, const std::vector<Complex>& g) {
  if (f.size() != g.size() || f.empty()) throw ValidationError("inner product needs equal nonempty lengths");
  return kernels::cdot(f.data(), g.data(), f.size()) / static_cast<double>(f.size());
}

nlohmann::json to_json(const CheckReport& report) {
  return {{"check", report.check},   {"params", report.params},         {"certified", report.certified},
          {"pass", report.pass},     {"worst_ratio", report.worst_ratio}, {"details", report.details}};
}

CheckReport check_orthonormal(const KUniverse& universe, std::size_t m, std::size_t N, std::size_t max_d,
                              double tolerance, std::size_t cap) {
  LabeledMatchingSpace space(universe, m, N, cap);
  auto indices = character_indices(universe, m, N, max_d);
  std::vector<std::vector<Complex>> vecs;
  for (const auto& idx : indices) vecs.push_back(character_vector(idx, space));
  double worst = 0;
  for (std::size_t a = 0; a < vecs.size(); ++a)
    for (std::size_t b = 0; b < vecs.size(); ++b) {
      Complex expected = a == b ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(inner_product(vecs[a], vecs[b]) - expected));
    }
  CheckReport r;
  r.check = "orthonormal";
  r.params = {{"U", universe.size()}, {"k", universe.k()}, {"m", m}, {"N", N}, {"max_d", max_d}, {"tolerance", tolerance}};
  r.certified = true;
  r.worst_ratio = worst / tolerance;
  r.pass = worst <= tolerance;
  r.details = {{"indices", indices.size()}, {"pairs", indices.size() * indices.size()}, {"worst_error", worst},
               {"space_size", space.size()}};
  return r;
}

MarkovKernel markov_kernel(const LabeledMatchingSpace& space, const OneWiseDistribution& mu, std::size_t cap) {
  if (mu.k() != space.k() || mu.N() != space.N()) throw ValidationError("distribution does not match the space");
  MarkovKernel kernel;
  kernel.rows = space.seed_count();
  kernel.cols = space.size();
  if (kernel.rows > cap / std::max<std::size_t>(kernel.cols, 1))
    throw CapExceeded("kernel matrix exceeds cap " + std::to_string(cap));
  kernel.exact.assign(kernel.rows * kernel.cols, Rational(0));
  const Rational share = Rational(1) / Rational(static_cast<unsigned long>(space.matchings().size()));
  const auto N = space.N();
  std::vector<Label> seeds;
  for (std::size_t x = 0; x < kernel.rows; ++x) seeds.push_back(vector_at(x, N, space.seed_dims()));
  Label w(space.k());
  for (std::size_t y = 0; y < kernel.cols; ++y) {
    auto labeled = space.at(y);
    for (std::size_t x = 0; x < kernel.rows; ++x) {
      Rational p = share;
      for (const auto& le : labeled.edges) {
        for (std::size_t j = 0; j < w.size(); ++j)
          w[j] = static_cast<Residue>((seeds[x][le.edge[j]] + N - le.label[j]) % N);
        p *= mu.prob(w);
        if (sgn(p) == 0) break;
      }
      kernel.exact[x * kernel.cols + y] = p;
    }
  }
  kernel.dense.reserve(kernel.exact.size());
  for (const auto& p : kernel.exact) kernel.dense.push_back(p.get_d());
  return kernel;
}

CheckReport check_kernel_rows(const MarkovKernel& kernel, double tolerance) {
  std::size_t exact_ok = 0;
  for (std::size_t x = 0; x < kernel.rows; ++x) {
    Rational s = 0;
    for (std::size_t y = 0; y < kernel.cols; ++y) s += kernel.at(x, y);
    exact_ok += s == 1;
  }
  std::vector<double> ones(kernel.cols, 1.0), sums(kernel.rows);
  kernels::matvec(kernel.dense.data(), kernel.rows, kernel.cols, ones.data(), sums.data());
  double worst = 0;
  for (double s : sums) worst = std::max(worst, std::abs(s - 1));
  CheckReport r;
  r.check = "kernel_rows";
  r.params = {{"rows", kernel.rows}, {"cols", kernel.cols}, {"tolerance", tolerance}};
  r.certified = true;
  r.worst_ratio = worst / tolerance;
  r.pass = exact_ok == kernel.rows && worst <= tolerance;
  r.details = {{"exact_rows_summing_to_one", exact_ok}, {"worst_error", worst}};
  return r;
}

std::vector<double> kernel_pullback(const MarkovKernel& kernel, const std::vector<double>& f) {
  if (f.size() != kernel.cols) throw ValidationError("function length does not match the kernel");
  std::vector<double> out(kernel.rows);
  kernels::matvec(kernel.dense.data(), kernel.rows, kernel.cols, f.data(), out.data());
  return out;
}

std::vector<Rational> kernel_pullback(const MarkovKernel& kernel, const std::vector<Rational>& f) {
  if (f.size() != kernel.cols) throw ValidationError("function length does not match the kernel");
  std::vector<Rational> out(kernel.rows, Rational(0));
  for (std::size_t x = 0; x < kernel.rows; ++x)
    for (std::size_t y = 0; y < kernel.cols; ++y)
      if (sgn(kernel.at(x, y)) != 0) out[x] += kernel.at(x, y) * f[y];
  return out;
}

CheckReport check_constant_pullback(const MarkovKernel& kernel) {
  auto exact = kernel_pullback(kernel, std::vector<Rational>(kernel.cols, Rational(1)));
  std::size_t exact_ones = 0;
  for (const auto& v : exact) exact_ones += v == 1;
  double worst = 0;
  for (double v : kernel_pullback(kernel, std::vector<double>(kernel.cols, 1.0))) worst = std::max(worst, std::abs(v - 1));
  CheckReport r;
  r.check = "constant_pullback";
  r.params = {{"rows", kernel.rows}, {"cols", kernel.cols}};
  r.certified = true;
  r.pass = exact_ones == kernel.rows;
  r.worst_ratio = static_cast<double>(kernel.rows - exact_ones);
  r.details = {{"exact_rows_equal_to_one", exact_ones}, {"floating_worst_error", worst}};
  return r;
}

std::vector<double> set_density(std::size_t space_size, const std::vector<std::size_t>& members) {
  if (members.empty()) throw ValidationError("density of an empty set is undefined");
  std::vector<double> f(space_size, 0.0);
  const double value = static_cast<double>(space_size) / static_cast<double>(members.size());
  for (auto i : members) {
    if (i >= space_size) throw ValidationError("set member out of range");
    if (f[i] != 0) throw ValidationError("set members must be distinct");
    f[i] = value;
  }
  return f;
}

std::vector<Complex> fourier_coefficients(const std::vector<Complex>& f, std::size_t N, std::size_t dims) {
  const auto size = group_size(N, dims);
  if (size > (std::size_t{1} << 13)) throw CapExceeded("Fourier transform domain exceeds 2^13 points");
  if (f.size() != size) throw ValidationError("function length must be N^dims");
  std::vector<Label> points;
  for (std::size_t x = 0; x < size; ++x) points.push_back(vector_at(x, N, dims));
  std::vector<Complex> out(size), chi(size);
  for (std::size_t b = 0; b < size; ++b) {
    for (std::size_t x = 0; x < size; ++x) chi[x] = root_of_unity(pairing(points[b], points[x], N), N);
    out[b] = kernels::cdot(f.data(), chi.data(), size) / static_cast<double>(size);
  }
  return out;
}

std::vector<Complex> fourier_coefficients(const std::vector<double>& f, std::size_t N, std::size_t dims) {
  return fourier_coefficients(std::vector<Complex>(f.begin(), f.end()), N, dims);
}

std::vector<double> level_weights(const std::vector<Complex>& coefficients, std::size_t N, std::size_t dims) {
  std::vector<double> out(dims + 1, 0.0);
  for (std::size_t b = 0; b < coefficients.size(); ++b) out[support_size(vector_at(b, N, dims))] += std::norm(coefficients[b]);
  return out;
}

CheckReport check_parseval(const std::vector<double>& f, std::size_t N, std::size_t dims, double tolerance) {
  auto coeffs = fourier_coefficients(f, N, dims);
  double spectral = 0;
  for (const auto& c : coeffs) spectral += std::norm(c);
  double norm = kernels::dot(f.data(), f.data(), f.size()) / static_cast<double>(f.size());
  double err = std::abs(spectral - norm);
  CheckReport r;
  r.check = "parseval";
  r.params = {{"N", N}, {"dims", dims}, {"tolerance", tolerance}};
  r.certified = true;
  r.worst_ratio = err / tolerance;
  r.pass = err <= tolerance;
  r.details = {{"spectral", spectral}, {"norm_sq", norm}, {"error", err}};
  return r;
}

std::vector<Complex> mask_coefficients(const OneWiseDistribution& mu) {
  const auto size = group_size(mu.N(), mu.k());
  std::vector<Complex> out(size);
  for (std::size_t t = 0; t < size; ++t) {
    auto tv = vector_at(t, mu.N(), mu.k());
    Complex s = 0;
    for (std::size_t z = 0; z < size; ++z)
      if (sgn(mu.pmf()[z]) != 0)
        s += mu.pmf()[z].get_d() * std::conj(root_of_unity(pairing(tv, vector_at(z, mu.N(), mu.k()), mu.N()), mu.N()));
    out[t] = s;
  }
  return out;
}

CheckReport check_single_coordinate_vanish(const OneWiseDistribution& mu, double tolerance) {
  auto r_t = mask_coefficients(mu);
  double worst = 0;
  std::size_t checked = 0;
  for (std::size_t t = 0; t < r_t.size(); ++t) {
    if (support_size(vector_at(t, mu.N(), mu.k())) != 1) continue;
    ++checked;
    worst = std::max(worst, std::abs(r_t[t]));
  }
  const bool one_wise = check_one_wise_independent(mu);
  CheckReport r;
  r.check = "single_coordinate_vanish";
  r.params = {{"N", mu.N()}, {"k", mu.k()}, {"one_wise", one_wise}, {"tolerance", tolerance}};
  r.certified = one_wise;
  r.worst_ratio = worst / tolerance;
  r.pass = worst <= tolerance;
  r.details = {{"frequencies", checked}, {"worst_abs", worst}, {"r_zero", std::abs(r_t[0])}};
  return r;
}

std::vector<Complex> adjoint_character(const MarkovKernel& kernel, const LabeledMatchingSpace& space,
                                       std::span<const Residue> b) {
  if (b.size() != space.seed_dims()) throw ValidationError("frequency length must equal the number of vertices");
  if (kernel.rows != space.seed_count() || kernel.cols != space.size())
    throw ValidationError("kernel does not match the space");
  std::vector<Complex> chi(kernel.rows);
  for (std::size_t x = 0; x < kernel.rows; ++x) chi[x] = root_character(b, vector_at(x, space.N(), b.size()), space.N());
  const double scale = static_cast<double>(kernel.cols) / static_cast<double>(kernel.rows);
  std::vector<Complex> out(kernel.cols, 0.0);
  for (std::size_t x = 0; x < kernel.rows; ++x)
    for (std::size_t y = 0; y < kernel.cols; ++y) out[y] += kernel.dense[x * kernel.cols + y] * chi[x];
  for (auto& v : out) v *= scale;
  return out;
}

CheckReport svd_structure_check(const LabeledMatchingSpace& space, const OneWiseDistribution& mu,
                                const std::vector<Label>& frequencies, double tolerance) {
  auto kernel = markov_kernel(space, mu);
  const auto& u = space.universe();
  const double n = static_cast<double>(u.size()), k = static_cast<double>(u.k()), m = static_cast<double>(space.m());
  const bool certified = n > 100 * k * m;

  std::size_t top = 0;
  for (const auto& b : frequencies) top = std::max(top, support_size(b) / 2);
  auto indices = character_indices(u, space.m(), space.N(), top);
  std::vector<std::vector<Complex>> psi;
  for (const auto& idx : indices) psi.push_back(character_vector(idx, space));

  std::vector<std::vector<Complex>> images;
  nlohmann::json per = nlohmann::json::array();
  double worst = 0, worst_residual = 0;
  bool norms_ok = true;
  for (const auto& b : frequencies) {
    images.push_back(adjoint_character(kernel, space, b));
    const auto& g = images.back();
    const auto level = support_size(b);
    double norm = squared_norm(g), captured = 0;
    for (std::size_t i = 0; i < indices.size(); ++i)
      if (indices[i].edges.size() <= level / 2) captured += std::norm(inner_product(g, psi[i]));
    // Squared distance to the span; a square root would magnify rounding.
    double residual = std::max(0.0, norm - captured);
    double bound = std::pow(100 * k * k * k * m * static_cast<double>(level) / (n * n), static_cast<double>(level) / 2);
    if (level == 0) bound = 1;
    worst_residual = std::max(worst_residual, residual);
    worst = std::max(worst, residual / tolerance);
    if (certified) {
      worst = std::max(worst, norm / bound);
      norms_ok = norms_ok && norm <= bound + tolerance;
    }
    per.push_back({{"b", b}, {"level", level}, {"norm_sq", norm}, {"residual_sq", residual}, {"bound", bound}});
  }
  double worst_overlap = 0;
  for (std::size_t a = 0; a < images.size(); ++a)
    for (std::size_t c = a + 1; c < images.size(); ++c)
      if (frequencies[a] != frequencies[c]) worst_overlap = std::max(worst_overlap, std::abs(inner_product(images[a], images[c])));
  worst = std::max(worst, worst_overlap / tolerance);

  CheckReport r;
  r.check = "svd_structure";
  r.params = {{"U", u.size()},
              {"k", u.k()},
              {"m", space.m()},
              {"N", space.N()},
              {"one_wise", check_one_wise_independent(mu)},
              {"tolerance", tolerance}};
  r.certified = certified;
  r.worst_ratio = worst;
  r.pass = worst_residual <= tolerance && worst_overlap <= tolerance && norms_ok;
  r.details = {{"frequencies", per}, {"worst_overlap", worst_overlap}, {"worst_residual_sq", worst_residual}};
  return r;
}

bool consistent(const LabeledMatching& y, const LabeledMatching& z) {
  for (const auto& le : z.edges) {
    const Label* label = y.find(le.edge);
    if (!label || *label != le.label) return false;
  }
  return true;
}

CheckReport check_global_set(const LabeledMatchingSpace& space, const std::vector<std::size_t>& members,
                             const LabeledMatching& z) {
  const auto& u = space.universe();
  if (z.edges.size() > space.m()) throw ValidationError("restriction has more than m edges");
  LabeledMatching zz = z;
  zz.m = z.edges.size();
  zz.N = space.N();
  zz.validate(u);

  std::vector<bool> in_a(space.size(), false);
  for (auto i : members) {
    if (i >= space.size()) throw ValidationError("set member out of range");
    in_a[i] = true;
  }
  std::vector<LabeledMatching> elements;
  for (std::size_t i = 0; i < space.size(); ++i) elements.push_back(space.at(i));
  for (auto i : members)
    if (!consistent(elements[i], zz)) throw ValidationError("set is not inside the restricted domain");

  auto density = [&](const LabeledMatching& r) {
    std::size_t domain = 0, hits = 0;
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (consistent(elements[i], r)) {
        ++domain;
        hits += in_a[i];
      }
    return make_rational(static_cast<long>(hits), static_cast<long>(domain));
  };
  const Rational base = density(zz);
  const auto base_support = zz.support();

  Rational worst = 0;
  std::size_t restrictions = 0;
  nlohmann::json worst_at;
  const std::size_t k = u.k();
  for (std::size_t d = zz.edges.size(); d <= space.m(); ++d) {
    const std::size_t extra = d - zz.edges.size();
    const auto labelings = group_size(space.N(), k * extra);
    for (const auto& mt : enumerate_matchings(u, d)) {
      if (!std::includes(mt.begin(), mt.end(), base_support.begin(), base_support.end())) continue;
      Matching fresh;
      std::set_difference(mt.begin(), mt.end(), base_support.begin(), base_support.end(), std::back_inserter(fresh));
      for (std::size_t li = 0; li < labelings; ++li) {
        auto flat = vector_at(li, space.N(), k * extra);
        LabeledMatching r = zz;
        for (std::size_t t = 0; t < extra; ++t)
          r.edges.push_back({fresh[t], Label(flat.begin() + t * k, flat.begin() + (t + 1) * k)});
        std::sort(r.edges.begin(), r.edges.end());
        r.m = d;
        ++restrictions;
        if (sgn(base) == 0) continue;
        BigInt allowed;
        mpz_ui_pow_ui(allowed.get_mpz_t(), 2, static_cast<unsigned long>(extra));
        Rational ratio = density(r) / base / Rational(allowed);
        if (ratio > worst) {
          worst = ratio;
          worst_at = nlohmann::json::array();
          for (const auto& le : r.edges) worst_at.push_back({{"edge", le.edge}, {"label", le.label}});
        }
      }
    }
  }
  CheckReport rep;
  rep.check = "global_set";
  rep.params = {{"U", u.size()}, {"k", k}, {"m", space.m()}, {"N", space.N()}, {"set_size", members.size()},
                {"restriction_edges", zz.edges.size()}};
  rep.certified = true;
  rep.worst_ratio = worst.get_d();
  rep.pass = worst <= 1;
  rep.details = {{"restrictions", restrictions}, {"base_density", to_string(base)}, {"worst_ratio_exact", to_string(worst)},
                 {"worst_restriction", worst_at}};
  return rep;
}

double decay_bound(double n, std::size_t level, double w) {
  const double l = static_cast<double>(level);
  if (l > n) return 0;
  if (l <= w) return std::pow(w / n, l / 2);
  return std::pow(l / (8 * n), l / 2) * std::pow(2.0, 2 * w);
}

CheckReport check_decay_bound_monotone(double n, std::size_t level, const std::vector<double>& w_grid) {
  if (!std::is_sorted(w_grid.begin(), w_grid.end())) throw ValidationError("w grid must be increasing");
  nlohmann::json drops = nlohmann::json::array();
  double worst = 0;
  for (std::size_t i = 0; i + 1 < w_grid.size(); ++i) {
    double lo = decay_bound(n, level, w_grid[i]), hi = decay_bound(n, level, w_grid[i + 1]);
    if (lo > 0) worst = std::max(worst, hi > 0 ? lo / hi : std::numeric_limits<double>::max());
    if (hi < lo * (1 - 1e-12)) drops.push_back({{"w_lo", w_grid[i]}, {"w_hi", w_grid[i + 1]}, {"F_lo", lo}, {"F_hi", hi}});
  }
  CheckReport r;
  r.check = "decay_bound_monotone";
  r.params = {{"n", n}, {"level", level}, {"grid_points", w_grid.size()}};
  r.certified = true;
  r.worst_ratio = worst;
  r.pass = drops.empty();
  r.details = {{"drops", drops}};
  return r;
}

CheckReport fourier_decay_check(const LabeledMatchingSpace& space, const OneWiseDistribution& mu,
                                const std::vector<std::size_t>& members, double tolerance) {
  auto kernel = markov_kernel(space, mu);
  auto f = kernel_pullback(kernel, set_density(space.size(), members));
  const auto dims = space.seed_dims();
  auto weights = level_weights(fourier_coefficients(f, space.N(), dims), space.N(), dims);
  const double n = static_cast<double>(space.universe().size());
  const double w = std::log2(static_cast<double>(space.size()) / static_cast<double>(members.size()));
  const bool global = check_global_set(space, members, LabeledMatching{space.N(), 0, {}}).pass;
  const double k = static_cast<double>(space.k()), m = static_cast<double>(space.m());
  const bool certified = n >= 1e8 * k * k * k * m && m >= 2 * (w + 1) && global;

  nlohmann::json levels = nlohmann::json::array();
  double worst = 0;
  bool pass = true;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    double bound = decay_bound(n, l, w);
    // A zero bound is measured against the tolerance.
    double ratio = bound > 0 ? weights[l] / bound : weights[l] / tolerance;
    bool ok = weights[l] <= bound + tolerance;
    pass = pass && ok;
    if (l > 0) worst = std::max(worst, ratio);
    levels.push_back({{"level", l}, {"weight", weights[l]}, {"bound", bound}, {"ratio", ratio}, {"pass", ok}});
  }
  CheckReport r;
  r.check = "fourier_decay";
  r.params = {{"U", space.universe().size()}, {"k", space.k()}, {"m", space.m()}, {"N", space.N()},
              {"set_size", members.size()}, {"w", w}, {"tolerance", tolerance}};
  r.certified = certified;
  r.worst_ratio = worst;
  r.pass = pass;
  r.details = {{"levels", levels}, {"global", global}};
  return r;
}

}  // namespace csplab

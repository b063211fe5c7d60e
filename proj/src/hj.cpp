#include "nambu/hj.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nambu/error.hpp"

namespace nambu {

Section::Section(ScalarField fiber) : fiber_(std::move(fiber)) {
  if (!fiber_.valid()) throw InvalidArgument("section needs a fiber field");
  if (fiber_.dimension() < 1) throw InvalidArgument("section base must have dimension >= 1");
}

std::vector<double> Section::embed(std::span<const double> base, double t) const {
  if (base.size() != base_dimension())
    throw InvalidArgument("base point has length " + std::to_string(base.size()) + ", expected " +
                          std::to_string(base_dimension()));
  return embed_carrier<double>(base, t);
}

std::vector<double> project(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("cannot project an empty point");
  return {x.begin(), x.end() - 1};
}

namespace {

void require_compatible(const HamiltonianTuple& h, const Section& section) {
  if (h.structure().dimension() != section.dimension())
    throw InvalidArgument("section and Hamiltonian tuple live in different dimensions");
}

}  // namespace

VectorField projected_field(const HamiltonianTuple& h, const Section& section) {
  require_compatible(h, section);
  const VolumeStructure s = h.structure();
  std::vector<ScalarField> hs(h.fields().begin(), h.fields().end());
  const std::size_t m = section.base_dimension();
  auto f = [s, hs, section, m](auto base, double t) {
    using C = typename decltype(base)::value_type;
    const std::vector<C> x = section.embed_carrier<C>(base, t);
    if constexpr (std::is_same_v<C, double>) s.require(x, t);
    std::vector<C> comps = hamiltonian_components<C>(s, hs, std::span<const C>(x), t);
    comps.resize(m);
    return comps;
  };
  return VectorField::make<1>(m, m, "X^gamma", f);
}

namespace {

double signed_relatedness(const HamiltonianTuple& h, const Section& section, std::span<const double> base,
                          double t) {
  require_compatible(h, section);
  const std::vector<double> x = section.embed(base, t);
  h.structure().require(x, t);
  const std::vector<double> flow = hamiltonian_components<double>(h.structure(), h.fields(), x, t);
  const std::vector<double> slope = gradient<double>(section.fiber(), base, t);
  double sum = -flow.back();
  for (std::size_t k = 0; k < slope.size(); ++k) sum += slope[k] * flow[k];
  return sum;
}

}  // namespace

double relatedness_residual(const HamiltonianTuple& h, const Section& section, std::span<const double> base,
                            double t) {
  return std::abs(signed_relatedness(h, section, base, t));
}

double hj_det_residual(const HamiltonianTuple& h, const Section& section, std::span<const double> base, double t) {
  require_compatible(h, section);
  const std::size_t m = section.base_dimension();
  auto seeded = seed<double>(base);
  const std::vector<Jet1> x = section.embed_carrier<Jet1>(std::span<const Jet1>(seeded), t);
  h.structure().require(std::vector<double>{section.embed(base, t)}, t);
  Matrix<double> jac(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const Jet1 v = h.fields()[i](std::span<const Jet1>(x), t);
    for (std::size_t j = 0; j < m && j < v.size(); ++j) jac(i, j) = v.d[j];
  }
  return determinant(jac);
}

double hj_sum_residual(const HamiltonianTuple& h, const Section& section, std::span<const double> base, double t) {
  require_compatible(h, section);
  const VolumeStructure& s = h.structure();
  const std::size_t n = s.dimension();
  const std::vector<double> x = section.embed(base, t);
  s.require(x, t);
  const Matrix<double> grads = jacobian<double>(h.fields(), std::span<const double>(x), t);
  const std::vector<double> slope = gradient<double>(section.fiber(), base, t);
  double sum = -determinant(grads.without_column(n - 1));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double minor = determinant(grads.without_column(k));
    if ((n - 1 - k) % 2 == 1) minor = -minor;
    sum += minor * slope[k];
  }
  return sum / s.density()(std::span<const double>(x), t);
}

const AnnihilatorLevel& AnnihilatorReport::level(std::size_t j) const {
  if (j < 1 || j > levels.size()) throw InvalidArgument("annihilator level out of range");
  return levels[j - 1];
}

namespace {

void combinations(std::size_t count, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f) {
  if (k > count) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == count - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t r = i; r < k; ++r) idx[r] = idx[r - 1] + 1;
  }
}

double rank_tolerance(const Eigen::VectorXd& sv) {
  const double top = sv.size() > 0 ? sv.maxCoeff() : 0.0;
  return 1e-10 * std::max(1.0, top);
}

std::size_t numeric_rank(const Eigen::MatrixXd& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd sv = svd.singularValues();
  const double tol = rank_tolerance(sv);
  return static_cast<std::size_t>((sv.array() > tol).count());
}

// Null space basis of a (rows x n) constraint matrix.
std::vector<std::vector<double>> null_space(const Eigen::MatrixXd& a, std::size_t n) {
  std::vector<std::vector<double>> out;
  if (a.rows() == 0) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> e(n, 0.0);
      e[i] = 1.0;
      out.push_back(std::move(e));
    }
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double tol = rank_tolerance(sv);
  const auto rank = static_cast<std::size_t>((sv.array() > tol).count());
  const Eigen::MatrixXd& v = svd.matrixV();
  for (std::size_t c = rank; c < n; ++c) {
    std::vector<double> col(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    out.push_back(std::move(col));
  }
  return out;
}

// dx^1 ^ .. (omit i) .. ^ dx^n evaluated on the n-1 columns of w.
double basis_form(const Matrix<double>& w, std::size_t omit) {
  const std::size_t n = w.rows();
  Matrix<double> sub(n - 1, n - 1);
  for (std::size_t r = 0, rr = 0; r < n; ++r) {
    if (r == omit) continue;
    for (std::size_t c = 0; c + 1 < n; ++c) sub(rr, c) = w(r, c);
    ++rr;
  }
  return determinant(sub);
}

}  // namespace

AnnihilatorReport lagrangian_check_subspace(const VolumeStructure& s, std::span<const double> x,
                                            const std::vector<std::vector<double>>& tangent_basis, double t) {
  const std::size_t n = s.dimension();
  s.require(x, t);
  for (const auto& v : tangent_basis)
    if (v.size() != n) throw InvalidArgument("tangent vectors must have length n");
  const std::size_t m = tangent_basis.size();
  const double rho = s.density()(x, t);

  AnnihilatorReport report;
  report.n = n;
  {
    Eigen::MatrixXd tb(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t r = 0; r < n; ++r) tb(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          tangent_basis[c][r];
    report.tangent_dimension = numeric_rank(tb);
  }

  Eigen::MatrixXd top_sharp;
  for (std::size_t j = 1; j + 1 <= n; ++j) {
    // alpha(v_L, e_M) = 0 for every j-subset L of the tangent basis and
    // every (n-1-j)-subset M of coordinate vectors.
    std::vector<std::vector<double>> rows;
    combinations(m, j, [&](const std::vector<std::size_t>& tl) {
      combinations(n, n - 1 - j, [&](const std::vector<std::size_t>& cm) {
        Matrix<double> w(n, n - 1);
        std::size_t col = 0;
        for (std::size_t k : tl) {
          for (std::size_t r = 0; r < n; ++r) w(r, col) = tangent_basis[k][r];
          ++col;
        }
        for (std::size_t k : cm) {
          w(k, col) = 1.0;
          ++col;
        }
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i) row[i] = basis_form(w, i);
        rows.push_back(std::move(row));
      });
    });
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < n; ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];

    AnnihilatorLevel level;
    level.j = j;
    level.basis = null_space(a, n);
    level.dimension = level.basis.size();
    Eigen::MatrixXd sharp(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(level.dimension));
    for (std::size_t c = 0; c < level.dimension; ++c)
      for (std::size_t i = 0; i < n; ++i) {
        const double sign = (n - 1 - i) % 2 == 0 ? 1.0 : -1.0;
        sharp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = sign * level.basis[c][i] / rho;
      }
    level.sharp_dimension = numeric_rank(sharp);
    if (j + 1 == n) top_sharp = sharp;
    report.levels.push_back(std::move(level));
  }

  // sharp(Lambda^(n-1)) = T_xE since rho != 0, so the Lagrangian condition
  // reduces to sharp Ann^(n-1) == T_xN.
  Eigen::MatrixXd joined(static_cast<Eigen::Index>(n), top_sharp.cols() + static_cast<Eigen::Index>(m));
  joined.leftCols(top_sharp.cols()) = top_sharp;
  for (std::size_t c = 0; c < m; ++c)
    for (std::size_t r = 0; r < n; ++r)
      joined(static_cast<Eigen::Index>(r), top_sharp.cols() + static_cast<Eigen::Index>(c)) = tangent_basis[c][r];
  const std::size_t joined_rank = numeric_rank(joined);
  report.excess_rank = joined_rank - report.tangent_dimension;
  const AnnihilatorLevel& top = report.levels.back();
  report.lagrangian = top.sharp_dimension == report.tangent_dimension && joined_rank == report.tangent_dimension;
  return report;
}

AnnihilatorReport lagrangian_check(const VolumeStructure& s, const Section& section, std::span<const double> base,
                                   double t) {
  if (section.dimension() != s.dimension()) throw InvalidArgument("section and structure dimensions differ");
  const std::size_t n = s.dimension();
  const std::vector<double> x = section.embed(base, t);
  const std::vector<double> slope = gradient<double>(section.fiber(), base, t);
  std::vector<std::vector<double>> basis;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::vector<double> v(n, 0.0);
    v[k] = 1.0;
    v[n - 1] = slope[k];
    basis.push_back(std::move(v));
  }
  return lagrangian_check_subspace(s, x, basis, t);
}

namespace {

std::string location(double lambda, std::span<const double> base) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda=" << lambda << " base=(";
  for (std::size_t i = 0; i < base.size(); ++i) os << (i ? "," : "") << base[i];
  os << ")";
  return os.str();
}

}  // namespace

CompleteSolutionReport complete_solution_check(const HamiltonianTuple& h, const CompleteSolution& cs,
                                               const std::vector<std::vector<double>>& base_grid, double tolerance,
                                               double t) {
  if (cs.lambdas.empty()) throw InvalidArgument("complete solution needs a non-empty lambda grid");
  if (base_grid.empty()) throw InvalidArgument("complete solution needs a non-empty base grid");
  if (!cs.family) throw InvalidArgument("complete solution needs a section family");
  constexpr double kLambdaStep = 1e-5;

  CompleteSolutionReport report;
  report.min_abs_jacobian = std::numeric_limits<double>::infinity();
  std::string det_failure;
  std::string jac_failure;
  std::string mono_failure;

  std::vector<double> lambdas = cs.lambdas;
  std::sort(lambdas.begin(), lambdas.end());
  for (double lambda : lambdas) {
    const Section sec = cs.family(lambda);
    const Section up = cs.family(lambda + kLambdaStep);
    const Section down = cs.family(lambda - kLambdaStep);
    const std::size_t m = sec.base_dimension();
    for (const auto& base : base_grid) {
      const double det = std::abs(hj_det_residual(h, sec, base, t));
      if (det > report.max_det_residual) report.max_det_residual = det;
      if (det > tolerance && det_failure.empty()) det_failure = "hj_det " + location(lambda, base);

      Matrix<double> jac(m + 1, m + 1);
      const std::vector<double> slope = gradient<double>(sec.fiber(), base, t);
      for (std::size_t k = 0; k < m; ++k) {
        jac(k, k) = 1.0;
        jac(m, k) = slope[k];
      }
      jac(m, m) = (up.fiber()(base, t) - down.fiber()(base, t)) / (2.0 * kLambdaStep);
      const double jd = std::abs(determinant(jac));
      report.min_abs_jacobian = std::min(report.min_abs_jacobian, jd);
      if (jd < 1e-10 && jac_failure.empty()) jac_failure = "singular Jacobian " + location(lambda, base);
    }
  }

  report.monotone_pass = true;
  for (const auto& base : base_grid) {
    std::vector<double> values;
    for (double lambda : lambdas) values.push_back(cs.family(lambda).fiber()(base, t));
    int direction = 0;
    for (std::size_t k = 1; k < values.size(); ++k) {
      const double diff = values[k] - values[k - 1];
      const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
      if (sign == 0 || (direction != 0 && sign != direction)) {
        report.monotone_pass = false;
        if (mono_failure.empty()) mono_failure = "non-monotone fiber " + location(lambdas[k], base);
        break;
      }
      direction = sign;
    }
  }

  report.det_pass = det_failure.empty();
  report.jacobian_pass = jac_failure.empty();
  for (const std::string* f : {&det_failure, &jac_failure, &mono_failure})
    if (report.failure.empty() && !f->empty()) report.failure = *f;
  return report;
}

double recover_label(const CompleteSolution& cs, std::span<const double> x, double t) {
  if (cs.lambdas.empty()) throw InvalidArgument("complete solution needs a non-empty lambda grid");
  const std::vector<double> base = project(x);
  const double target = x.back();
  std::vector<double> lambdas = cs.lambdas;
  std::sort(lambdas.begin(), lambdas.end());
  auto gap = [&](double lambda) { return cs.family(lambda).fiber()(base, t) - target; };

  double prev = gap(lambdas.front());
  if (prev == 0.0) return lambdas.front();
  for (std::size_t k = 1; k < lambdas.size(); ++k) {
    const double cur = gap(lambdas[k]);
    if (cur == 0.0) return lambdas[k];
    if ((prev < 0.0) != (cur < 0.0)) {
      double lo = lambdas[k - 1];
      double hi = lambdas[k];
      double flo = prev;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = gap(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    prev = cur;
  }
  throw DomainError("point is not covered by the sections of the lambda grid");
}

}  // namespace nambu

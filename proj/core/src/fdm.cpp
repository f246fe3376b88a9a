#include "srbf/fdm.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "srbf/common.hpp"

namespace srbf {

namespace {

std::string where(std::span<const double> x) {
  std::ostringstream s;
  s.precision(17);
  s << "(";
  for (std::size_t k = 0; k < x.size(); ++k) s << (k ? ", " : "") << x[k];
  s << ")";
  return s.str();
}

double coefficient_at(const MultiscaleProblem& problem, std::span<const double> x) {
  const double a = problem.a(x);
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw NumericalError("coefficient is not positive at " + where(x) + ": a = " + std::to_string(a));
  }
  return a;
}

double harmonic(double l, double r) { return 2.0 * l * r / (l + r); }

double face_coefficient(const MultiscaleProblem& problem, FaceAveraging averaging, std::span<const double> left,
                        std::span<const double> right) {
  if (averaging == FaceAveraging::harmonic) {
    return harmonic(coefficient_at(problem, left), coefficient_at(problem, right));
  }
  double mid[kMaxDim];
  for (std::size_t k = 0; k < left.size(); ++k) mid[k] = 0.5 * (left[k] + right[k]);
  return coefficient_at(problem, {mid, left.size()});
}

void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little) {
    throw UnsupportedError("binary reference dumps need a little-endian host");
  }
}

}  // namespace

std::string_view to_string(FaceAveraging averaging) {
  return averaging == FaceAveraging::midpoint ? "midpoint" : "harmonic";
}

FaceAveraging face_averaging_from_string(std::string_view text) {
  if (text == "midpoint") return FaceAveraging::midpoint;
  if (text == "harmonic") return FaceAveraging::harmonic;
  throw ConfigError("averaging: expected \"midpoint\" or \"harmonic\", got \"" + std::string(text) + "\"");
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
    if (col[k] == j) return val[k];
  }
  return 0.0;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

FdmSolution solve_1d(const MultiscaleProblem& problem, double h, FaceAveraging averaging) {
  if (problem.dimension != 1) throw ConfigError("solve_1d: problem is not one-dimensional");
  const std::size_t cells = cells_for_spacing(h);
  if (cells < 2) throw ConfigError("solve_1d: mesh needs at least two cells");
  const RegularGrid grid(1, cells);
  const std::size_t m = cells - 1;

  std::vector<double> face(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double l = grid.coordinate(i);
    const double r = grid.coordinate(i + 1);
    face[i] = face_coefficient(problem, averaging, {&l, 1}, {&r, 1});
  }

  FdmSolution sol{1, cells, std::vector<double>(cells + 1)};
  const double x0 = 0.0;
  const double x1 = 1.0;
  sol.values.front() = problem.g({&x0, 1});
  sol.values.back() = problem.g({&x1, 1});

  // Row i (node i+1): -face[i] u_i + (face[i] + face[i+1]) u_{i+1} - face[i+1] u_{i+2} = h^2 f.
  const double h2 = grid.spacing() * grid.spacing();
  std::vector<double> c_prime(m), d_prime(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t node = r + 1;
    const double x = grid.coordinate(node);
    const double lower = -face[node - 1];
    const double upper = -face[node];
    const double diag = face[node - 1] + face[node];
    double rhs = h2 * problem.f({&x, 1});
    if (r == 0) rhs -= lower * sol.values.front();
    if (r + 1 == m) rhs -= upper * sol.values.back();
    const double denom = r == 0 ? diag : diag - lower * c_prime[r - 1];
    if (denom == 0.0) throw NumericalError("solve_1d: zero pivot at x = " + std::to_string(x));
    c_prime[r] = r + 1 == m ? 0.0 : upper / denom;
    d_prime[r] = (rhs - (r == 0 ? 0.0 : lower * d_prime[r - 1])) / denom;
  }
  for (std::size_t r = m; r-- > 0;) {
    sol.values[r + 1] = d_prime[r] - (r + 1 == m ? 0.0 : c_prime[r] * sol.values[r + 2]);
  }
  for (double v : sol.values) {
    if (!std::isfinite(v)) throw NumericalError("solve_1d: non-finite solution");
  }
  return sol;
}

LinearSystem assemble_2d(const MultiscaleProblem& problem, std::size_t cells, FaceAveraging averaging) {
  if (problem.dimension != 2) throw ConfigError("assemble_2d: problem is not two-dimensional");
  if (cells < 2) throw ConfigError("assemble_2d: mesh needs at least two cells");
  const RegularGrid grid(2, cells);
  const std::size_t n = cells + 1;
  const std::size_t m = cells - 1;
  const double h2 = grid.spacing() * grid.spacing();

  // ax[i*n + j]: face between (i, j) and (i+1, j); ay[i*n + j]: between (i, j) and (i, j+1).
  std::vector<double> ax(n * n, 0.0), ay(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p[2] = {grid.coordinate(i), grid.coordinate(j)};
      if (i + 1 < n) {
        const double q[2] = {grid.coordinate(i + 1), grid.coordinate(j)};
        ax[i * n + j] = face_coefficient(problem, averaging, p, q);
      }
      if (j + 1 < n) {
        const double q[2] = {grid.coordinate(i), grid.coordinate(j + 1)};
        ay[i * n + j] = face_coefficient(problem, averaging, p, q);
      }
    }
  }

  auto boundary_value = [&](std::size_t i, std::size_t j) {
    const double p[2] = {grid.coordinate(i), grid.coordinate(j)};
    return problem.g(p);
  };

  LinearSystem sys;
  SparseMatrix& a = sys.matrix;
  a.rows = m * m;
  a.row_ptr.reserve(a.rows + 1);
  a.col.reserve(a.rows * 5);
  a.val.reserve(a.rows * 5);
  sys.rhs.resize(a.rows);
  a.row_ptr.push_back(0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const double p[2] = {grid.coordinate(i), grid.coordinate(j)};
      const double west = ax[(i - 1) * n + j];
      const double east = ax[i * n + j];
      const double south = ay[i * n + j - 1];
      const double north = ay[i * n + j];
      double rhs = h2 * problem.f(p);
      const std::size_t row = (i - 1) * m + (j - 1);
      // Column order ascending: west, south, centre, north, east.
      if (i > 1) {
        a.col.push_back(row - m);
        a.val.push_back(-west);
      } else {
        rhs += west * boundary_value(0, j);
      }
      if (j > 1) {
        a.col.push_back(row - 1);
        a.val.push_back(-south);
      } else {
        rhs += south * boundary_value(i, 0);
      }
      a.col.push_back(row);
      a.val.push_back(west + east + south + north);
      if (j < m) {
        a.col.push_back(row + 1);
        a.val.push_back(-north);
      } else {
        rhs += north * boundary_value(i, cells);
      }
      if (i < m) {
        a.col.push_back(row + m);
        a.val.push_back(-east);
      } else {
        rhs += east * boundary_value(cells, j);
      }
      sys.rhs[row] = rhs;
      a.row_ptr.push_back(a.col.size());
    }
  }
  return sys;
}

CgResult pcg(const SparseMatrix& a, std::span<const double> b, std::span<double> x, double tolerance,
             std::size_t max_iterations) {
  const std::size_t n = a.rows;
  std::vector<double> inv_diag(n), r(n), z(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.at(i, i);
    if (!(d > 0.0)) throw NumericalError("pcg: non-positive diagonal in row " + std::to_string(i));
    inv_diag[i] = 1.0 / d;
  }
  auto dot = [n](const std::vector<double>& u, auto&& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
    return s;
  };

  double b_norm = 0.0;
  for (double v : b) b_norm += v * v;
  b_norm = std::sqrt(b_norm);

  a.multiply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  CgResult result;
  const double scale = b_norm > 0.0 ? b_norm : 1.0;
  double r_norm = std::sqrt(dot(r, r));
  result.relative_residual = r_norm / scale;
  if (result.relative_residual <= tolerance) {
    result.converged = true;
    return result;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  while (result.iterations < max_iterations) {
    a.multiply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) throw NumericalError("pcg: matrix is not positive definite");
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    ++result.iterations;
    r_norm = std::sqrt(dot(r, r));
    result.relative_residual = r_norm / scale;
    if (result.relative_residual <= tolerance) {
      result.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return result;
}

FdmSolution solve_2d(const MultiscaleProblem& problem, double h, FaceAveraging averaging, double tolerance) {
  if (problem.dimension != 2) throw ConfigError("solve_2d: problem is not two-dimensional");
  const std::size_t cells = cells_for_spacing(h);
  const LinearSystem sys = assemble_2d(problem, cells, averaging);
  const std::size_t m = cells - 1;
  std::vector<double> interior(sys.rhs.size(), 0.0);
  const std::size_t cap = std::max<std::size_t>(1000, 20 * cells * 10);
  const CgResult cg = pcg(sys.matrix, sys.rhs, interior, tolerance, cap);
  if (!cg.converged) {
    throw NumericalError("solve_2d: conjugate gradients stopped after " + std::to_string(cg.iterations) +
                         " iterations with relative residual " + std::to_string(cg.relative_residual));
  }

  FdmSolution sol{2, cells, {}};
  const RegularGrid grid(2, cells);
  const std::size_t n = cells + 1;
  sol.values.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == 0 || j == 0 || i == cells || j == cells) {
        const double p[2] = {grid.coordinate(i), grid.coordinate(j)};
        sol.values[i * n + j] = problem.g(p);
      } else {
        sol.values[i * n + j] = interior[(i - 1) * m + (j - 1)];
      }
    }
  }
  return sol;
}

FdmSolution solve_reference(const MultiscaleProblem& problem, double h, FaceAveraging averaging) {
  switch (problem.dimension) {
    case 1:
      return solve_1d(problem, h, averaging);
    case 2:
      return solve_2d(problem, h, averaging);
    default:
      throw UnsupportedError(
          "no finite-difference reference in 3D; compare runs by self-convergence against the smallest-epsilon run "
          "instead (sweep computes it)");
  }
}

std::vector<std::vector<double>> nodal_gradient(const FdmSolution& solution) {
  const RegularGrid grid = solution.grid();
  const std::size_t count = grid.node_count();
  const std::size_t cells = solution.cells;
  const double h = solution.spacing();
  std::vector<std::vector<double>> grad(static_cast<std::size_t>(solution.dimension), std::vector<double>(count));
  for (int k = 0; k < solution.dimension; ++k) {
    std::size_t stride = 1;
    for (int j = solution.dimension - 1; j > k; --j) stride *= grid.nodes_per_axis();
    for (std::size_t flat = 0; flat < count; ++flat) {
      const std::size_t i = grid.unflatten(flat)[static_cast<std::size_t>(k)];
      const auto& u = solution.values;
      double d;
      if (i == 0) {
        d = (-3.0 * u[flat] + 4.0 * u[flat + stride] - u[flat + 2 * stride]) / (2.0 * h);
      } else if (i == cells) {
        d = (3.0 * u[flat] - 4.0 * u[flat - stride] + u[flat - 2 * stride]) / (2.0 * h);
      } else {
        d = (u[flat + stride] - u[flat - stride]) / (2.0 * h);
      }
      grad[static_cast<std::size_t>(k)][flat] = d;
    }
  }
  return grad;
}

void write_csv(std::ostream& out, const FdmSolution& solution) {
  static constexpr const char* names[] = {"x", "y", "z"};
  const RegularGrid grid = solution.grid();
  for (int k = 0; k < solution.dimension; ++k) out << names[k] << ",";
  out << "u\n";
  char buf[32];
  auto put = [&](double v) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, end - buf);
  };
  for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
    const auto x = grid.node(flat);
    for (int k = 0; k < solution.dimension; ++k) {
      put(x[static_cast<std::size_t>(k)]);
      out << ',';
    }
    put(solution.values[flat]);
    out << '\n';
  }
}

void write_binary(std::ostream& out, const FdmSolution& solution) {
  require_little_endian();
  nlohmann::json header{{"dimension", solution.dimension},
                        {"h", solution.spacing()},
                        {"cells", solution.cells},
                        {"nodes_per_axis", solution.cells + 1},
                        {"format", "f64le-row-major"}};
  out << header.dump() << '\n';
  out.write(reinterpret_cast<const char*>(solution.values.data()),
            static_cast<std::streamsize>(solution.values.size() * sizeof(double)));
}

FdmSolution read_binary(std::istream& in) {
  require_little_endian();
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("reference dump: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("reference dump: bad header: ") + e.what());
  }
  if (header.value("format", "") != "f64le-row-major") throw ConfigError("reference dump: unknown format");
  FdmSolution sol;
  sol.dimension = header.at("dimension").get<int>();
  sol.cells = header.at("cells").get<std::size_t>();
  if (sol.dimension < 1 || sol.dimension > kMaxDim || sol.cells < 1) {
    throw ConfigError("reference dump: bad dimension or cell count");
  }
  const std::size_t count = RegularGrid(sol.dimension, sol.cells).node_count();
  sol.values.resize(count);
  in.read(reinterpret_cast<char*>(sol.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double)) {
    throw ConfigError("reference dump: truncated data");
  }
  return sol;
}

}  // namespace srbf

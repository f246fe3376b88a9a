#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srbf/problem.hpp"
#include "srbf/sampling.hpp"

namespace srbf {

/// How the coefficient is taken on a cell face between two nodes.
enum class FaceAveraging {
  midpoint,  // a evaluated at the face centre
  harmonic,  // 2 a_L a_R / (a_L + a_R) of the two node values
};

std::string_view to_string(FaceAveraging averaging);
FaceAveraging face_averaging_from_string(std::string_view text);

/// Nodal solution on the closed lattice {i h}^n, row-major with x slowest.
struct FdmSolution {
  int dimension = 1;
  std::size_t cells = 0;
  std::vector<double> values;

  double spacing() const { return 1.0 / static_cast<double>(cells); }
  RegularGrid grid() const { return RegularGrid(dimension, cells); }
};

/// Compressed sparse rows.
struct SparseMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col;
  std::vector<double> val;

  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Interior-node system of the conservative 5-point scheme scaled by h^2:
///   sum_faces a_f (u_i - u_nb) = h^2 f_i, boundary neighbours moved to the rhs.
/// Unknown k maps to interior node (i, j) with k = (i-1)(cells-1) + (j-1).
struct LinearSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

LinearSystem assemble_2d(const MultiscaleProblem& problem, std::size_t cells,
                         FaceAveraging averaging = FaceAveraging::midpoint);

struct CgResult {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients; `x` holds the initial guess.
CgResult pcg(const SparseMatrix& a, std::span<const double> b, std::span<double> x, double tolerance,
             std::size_t max_iterations);

/// Three-point conservative scheme, Thomas algorithm.
FdmSolution solve_1d(const MultiscaleProblem& problem, double h, FaceAveraging averaging = FaceAveraging::midpoint);

/// Five-point conservative scheme, PCG to relative residual `tolerance`.
/// Throws NumericalError with the final residual if the iteration cap is hit.
FdmSolution solve_2d(const MultiscaleProblem& problem, double h, FaceAveraging averaging = FaceAveraging::midpoint,
                     double tolerance = 1e-10);

/// Dispatches on dimension; 3D throws UnsupportedError.
FdmSolution solve_reference(const MultiscaleProblem& problem, double h,
                            FaceAveraging averaging = FaceAveraging::midpoint);

/// Nodal gradient: central differences inside, second-order one-sided at the
/// boundary. Returns one vector per axis.
std::vector<std::vector<double>> nodal_gradient(const FdmSolution& solution);

/// Rows "x[,y],u" with a header line.
void write_csv(std::ostream& out, const FdmSolution& solution);

/// One JSON header line {"dimension","h","cells","nodes_per_axis","format"}
/// followed by the values as little-endian doubles.
void write_binary(std::ostream& out, const FdmSolution& solution);
FdmSolution read_binary(std::istream& in);

}  // namespace srbf

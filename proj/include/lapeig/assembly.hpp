#pragma once

#include "lapeig/coefficient.hpp"
#include "lapeig/common.hpp"
#include "lapeig/mesh.hpp"
#include "lapeig/quadrature.hpp"

#include <functional>

namespace lapeig {

using ScalarFunction = std::function<double(const Point&)>;

/// [A]_ij = sum_T sum_q w_q k(x_q) grad phi_i . grad phi_j over free dofs;
/// Dirichlet rows and columns are eliminated.
SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& field,
                                const QuadratureRule& quad = QuadratureRule::edge_midpoints());

SparseMatrix assemble_laplacian(const Mesh& mesh);

/// Stiffness over all nodes, boundary included, in node numbering.
SparseMatrix assemble_full_stiffness(const Mesh& mesh, const CoefficientField& field,
                                     const QuadratureRule& quad = QuadratureRule::edge_midpoints());

/// b_i = int f phi_i - sum_{boundary j} [A_full]_ij g(x_j). Null f means f = 0.
Vector assemble_rhs(const Mesh& mesh, const CoefficientField& field, const ScalarFunction& source,
                    const ScalarFunction& dirichlet,
                    const QuadratureRule& quad = QuadratureRule::edge_midpoints());

/// Smallest coefficient value over all quadrature nodes.
double min_at_quadrature(const Mesh& mesh, const CoefficientField& field, const QuadratureRule& quad);

/// Full nodal vector from free-dof values and Dirichlet data on the boundary.
Vector extend_with_boundary(const Mesh& mesh, const Vector& dof_values, const ScalarFunction& dirichlet);

bool is_symmetric(const SparseMatrix& m, double rel_tol = 1e-14);

/// max |m_ij|
double max_abs(const SparseMatrix& m);

} // namespace lapeig

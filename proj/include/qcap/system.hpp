#pragma once

#include "qcap/mesh.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qcap {

inline constexpr double eps0 = 8.8541878128e-12;  // F/m

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    const std::vector<double>& data() const { return data_; }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// S * Sigma = V. Conductor rows enforce potential, interface rows the
/// normal-D continuity condition.
struct DenseSystem {
    DenseMatrix S;  // N x N
    DenseMatrix V;  // N x n_cond, 1 where element m belongs to conductor j
};

/// Total surface charge density per element (rows) and excitation (columns), C/m^2.
struct ChargeSolution {
    DenseMatrix sigma;
};

/// Per-unit-length capacitance matrix, F/m.
struct CapacitanceMatrix {
    DenseMatrix values;

    std::size_t size() const { return values.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

DenseSystem assemble_system(const Mesh& mesh, bool grounded, unsigned threads = 1);

/// Gaussian elimination with scaled partial pivoting, one forward/back
/// substitution per excitation column. Throws SolveError on a (numerically)
/// singular matrix.
ChargeSolution factor_solve(const DenseSystem& sys);

/// ||S * Sigma - V||_inf / ||V||_inf
double relative_residual(const DenseSystem& sys, const ChargeSolution& sol);

CapacitanceMatrix extract_capacitance(const ChargeSolution& sol, const Mesh& mesh);

/// Bytes for matrix, right-hand sides and solution: 8 * N * (N + 2 * n_cond).
double memory_estimate(std::size_t n, std::size_t n_cond);

/// max over excitation columns of |sigma|, per element.
std::vector<double> charge_scores(const ChargeSolution& sol);

struct MeshSolve {
    ChargeSolution charges;
    CapacitanceMatrix capacitance;
    double assemble_s = 0.0;
    double solve_s = 0.0;    // factorization, substitution and extraction
    double memory_bytes = 0.0;
};

/// Assemble, solve and extract on one mesh.
MeshSolve solve_mesh(const Mesh& mesh, unsigned threads = 1);

} // namespace qcap

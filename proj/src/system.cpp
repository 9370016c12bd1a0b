#include "qcap/system.hpp"

#include "qcap/errors.hpp"
#include "qcap/kernel.hpp"
#include "qcap/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace qcap {

namespace {

constexpr double inv_eps0 = 1.0 / eps0;
constexpr double pivot_floor = 1e-30;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void fill_conductor_row(std::span<double> row, const Mesh& mesh, std::size_t m, bool grounded) {
    Vec2 obs = mesh.elements[m].mid;
    for (std::size_t n = 0; n < mesh.size(); ++n) {
        const auto& src = mesh.elements[n];
        row[n] = inv_eps0 * (grounded ? grounded_potential(src, obs) : segment_potential(src, obs));
    }
}

void fill_interface_row(std::span<double> row, const Mesh& mesh, std::size_t m, bool grounded) {
    const auto& target = mesh.elements[m];
    const auto& d = std::get<DielectricInterface>(target.kind);
    for (std::size_t n = 0; n < mesh.size(); ++n) {
        const auto& src = mesh.elements[n];
        Vec2 field{0.0, 0.0};
        try {
            if (n != m) {
                field = segment_field(src, target.mid);
            }
            // The image of the element itself is an ordinary off-element source.
            if (grounded) {
                field = field - segment_field(mirror_y(src.a), mirror_y(src.b), target.mid);
            }
        } catch (const SingularKernelError&) {
            throw SolveError("collocation point of element " + std::to_string(m) +
                             " coincides with an endpoint of element " + std::to_string(n));
        }
        row[n] = -inv_eps0 * dot(field, target.normal);
    }
    row[m] += (d.eps_r_pos + d.eps_r_neg) / (2.0 * eps0 * (d.eps_r_neg - d.eps_r_pos));
}

} // namespace

DenseSystem assemble_system(const Mesh& mesh, bool grounded, unsigned threads) {
    const std::size_t n = mesh.size();
    if (n == 0) {
        throw SolveError("cannot assemble an empty mesh");
    }
    DenseSystem sys{DenseMatrix(n, n), DenseMatrix(n, static_cast<std::size_t>(mesh.n_cond))};
    parallel_for(n, threads, [&](std::size_t m) {
        const auto& e = mesh.elements[m];
        if (const auto* face = std::get_if<ConductorFace>(&e.kind)) {
            fill_conductor_row(sys.S.row(m), mesh, m, grounded);
            sys.V(m, static_cast<std::size_t>(face->conductor)) = 1.0;
        } else {
            fill_interface_row(sys.S.row(m), mesh, m, grounded);
        }
    });
    return sys;
}

ChargeSolution factor_solve(const DenseSystem& sys) {
    const std::size_t n = sys.S.rows();
    if (sys.S.cols() != n || sys.V.rows() != n) {
        throw SolveError("system dimensions are inconsistent");
    }
    DenseMatrix lu = sys.S;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = lu.row(i);
        double s = 0.0;
        for (double x : r) {
            s = std::max(s, std::abs(x));
        }
        if (s == 0.0) {
            throw SolveError("singular matrix: row " + std::to_string(i) + " is zero");
        }
        scale[i] = s;
    }

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = -1.0;
        for (std::size_t i = k; i < n; ++i) {
            double cand = std::abs(lu(i, k)) / scale[i];
            if (cand > best) {
                best = cand;
                p = i;
            }
        }
        if (best < pivot_floor) {
            throw SolveError("numerically singular matrix at pivot " + std::to_string(k));
        }
        if (p != k) {
            auto rk = lu.row(k);
            auto rp = lu.row(p);
            std::swap_ranges(rk.begin(), rk.end(), rp.begin());
            std::swap(scale[k], scale[p]);
            std::swap(perm[k], perm[p]);
        }
        const double pivot = lu(k, k);
        const double* pivot_row = lu.row(k).data();
        for (std::size_t i = k + 1; i < n; ++i) {
            double* r = lu.row(i).data();
            double factor = r[k] / pivot;
            r[k] = factor;
            if (factor == 0.0) {
                continue;
            }
            for (std::size_t j = k + 1; j < n; ++j) {
                r[j] -= factor * pivot_row[j];
            }
        }
    }

    const std::size_t ncols = sys.V.cols();
    ChargeSolution sol{DenseMatrix(n, ncols)};
    std::vector<double> x(n);
    for (std::size_t c = 0; c < ncols; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = sys.V(perm[i], c);
            const double* r = lu.row(i).data();
            for (std::size_t j = 0; j < i; ++j) {
                acc -= r[j] * x[j];
            }
            x[i] = acc;
        }
        for (std::size_t i = n; i-- > 0;) {
            double acc = x[i];
            const double* r = lu.row(i).data();
            for (std::size_t j = i + 1; j < n; ++j) {
                acc -= r[j] * x[j];
            }
            x[i] = acc / r[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            sol.sigma(i, c) = x[i];
        }
    }
    return sol;
}

double relative_residual(const DenseSystem& sys, const ChargeSolution& sol) {
    const std::size_t n = sys.S.rows();
    const std::size_t ncols = sys.V.cols();
    double worst = 0.0;
    double vnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < ncols; ++c) {
            double acc = -sys.V(i, c);
            for (std::size_t j = 0; j < n; ++j) {
                acc += sys.S(i, j) * sol.sigma(j, c);
            }
            worst = std::max(worst, std::abs(acc));
            vnorm = std::max(vnorm, std::abs(sys.V(i, c)));
        }
    }
    return vnorm > 0.0 ? worst / vnorm : worst;
}

CapacitanceMatrix extract_capacitance(const ChargeSolution& sol, const Mesh& mesh) {
    const auto ncond = static_cast<std::size_t>(mesh.n_cond);
    CapacitanceMatrix c{DenseMatrix(ncond, ncond)};
    for (std::size_t k = 0; k < mesh.size(); ++k) {
        const auto& e = mesh.elements[k];
        const auto* face = std::get_if<ConductorFace>(&e.kind);
        if (face == nullptr) {
            continue;
        }
        // Free charge on a face is eps_r times the total charge.
        const double weight = face->eps_r * e.length;
        for (std::size_t j = 0; j < ncond; ++j) {
            c.values(static_cast<std::size_t>(face->conductor), j) += weight * sol.sigma(k, j);
        }
    }
    return c;
}

double memory_estimate(std::size_t n, std::size_t n_cond) {
    auto nd = static_cast<double>(n);
    return 8.0 * nd * (nd + 2.0 * static_cast<double>(n_cond));
}

std::vector<double> charge_scores(const ChargeSolution& sol) {
    std::vector<double> score(sol.sigma.rows(), 0.0);
    for (std::size_t k = 0; k < score.size(); ++k) {
        for (double v : sol.sigma.row(k)) {
            score[k] = std::max(score[k], std::abs(v));
        }
    }
    return score;
}

MeshSolve solve_mesh(const Mesh& mesh, unsigned threads) {
    MeshSolve out;
    auto t0 = Clock::now();
    DenseSystem sys = assemble_system(mesh, mesh.ground_plane, threads);
    out.assemble_s = seconds_since(t0);
    auto t1 = Clock::now();
    out.charges = factor_solve(sys);
    out.capacitance = extract_capacitance(out.charges, mesh);
    out.solve_s = seconds_since(t1);
    out.memory_bytes = memory_estimate(mesh.size(), static_cast<std::size_t>(mesh.n_cond));
    return out;
}

} // namespace qcap

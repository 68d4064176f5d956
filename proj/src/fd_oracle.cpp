#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "isolab/errors.hpp"
#include "isolab/spectral.hpp"

namespace isolab {

// Five-point Dirichlet Laplacian on the uniform grid of interior points;
// boundary conditions imposed by deleting exterior nodes (staircase, O(h)).
// Lowest eigenvalues by inverse subspace iteration with Rayleigh-Ritz.
std::vector<double> fd_oracle(const Shape& shape, double h, int n_eigs,
                              const FdOracleOptions& opt) {
    if (!(h > 0) || h > (shape.x_max() - shape.x_min()) / 50)
        throw GridTooCoarse("fd_oracle: step too large");
    if (n_eigs < 1) throw std::invalid_argument("fd_oracle: need n_eigs >= 1");

    const int nx = static_cast<int>(std::ceil((shape.x_max() - shape.x_min()) / h)) + 2;
    const int ny = static_cast<int>(std::ceil((shape.y_max() - shape.y_min()) / h)) + 2;
    const double x0 = shape.x_min(), y0 = shape.y_min();

    std::vector<int> index(static_cast<std::size_t>(nx) * ny, -1);
    auto id = [&](int i, int j) -> int& { return index[static_cast<std::size_t>(j) * nx + i]; };
    int n = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (shape.inside({x0 + i * h, y0 + j * h}, 0)) id(i, j) = n++;
    if (n < 1000) throw GridTooCoarse("fd_oracle: fewer than 1000 interior nodes");

    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    trips.reserve(5 * static_cast<std::size_t>(n));
    const double inv_h2 = 1.0 / (h * h);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int r = id(i, j);
            if (r < 0) continue;
            trips.emplace_back(r, r, 4 * inv_h2);
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int q = 0; q < 4; ++q) {
                int ii = i + di[q], jj = j + dj[q];
                if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
                int c = id(ii, jj);
                if (c >= 0) trips.emplace_back(r, c, -inv_h2);
            }
        }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
        throw IllConditioned("fd_oracle: factorization failed");

    const int m = std::min(n, n_eigs + 4);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd x(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) x(i, j) = gauss(rng);

    Eigen::VectorXd ritz_prev = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd ritz(m);
    for (int it = 0; it < opt.max_iters; ++it) {
        Eigen::MatrixXd y = solver.solve(x);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
        Eigen::MatrixXd aq = A * q;
        Eigen::MatrixXd small = q.transpose() * aq;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
        ritz = es.eigenvalues();
        x = q * es.eigenvectors();
        double rel = 0;
        for (int j = 0; j < n_eigs; ++j)
            rel = std::max(rel, std::abs(ritz(j) - ritz_prev(j)) / std::abs(ritz(j)));
        if (it > 2 && rel < opt.tol) break;
        ritz_prev = ritz;
    }
    std::vector<double> out(ritz.data(), ritz.data() + n_eigs);
    return out;
}

} // namespace isolab

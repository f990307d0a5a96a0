#include "markov/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "markov/errors.hpp"

namespace markov {

Eigen::MatrixXd psd_repair(const Eigen::MatrixXd& cov, double tol) {
    if (cov.rows() != cov.cols())
        throw ShapeMismatch("covariance must be square");
    if (cov.rows() == 0) return cov;
    Eigen::MatrixXd sym = (cov + cov.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success)
        throw ShapeMismatch("eigendecomposition failed");
    Eigen::VectorXd vals = eig.eigenvalues();
    double top = vals.size() ? vals.maxCoeff() : 0.0;
    double floor_allowed = -tol * std::max(top, 1.0);
    bool clipped = false;
    for (int i = 0; i < vals.size(); ++i) {
        if (vals(i) < floor_allowed)
            throw NotPsd("covariance has negative eigenvalue " + std::to_string(vals(i)));
        if (vals(i) < 0.0) {
            vals(i) = 0.0;
            clipped = true;
        }
    }
    if (!clipped) return sym;
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

Gaussian::Gaussian(Eigen::VectorXd mean_in, const Eigen::MatrixXd& cov_in)
    : mean(std::move(mean_in)), cov(psd_repair(cov_in)) {
    if (cov.rows() != mean.size())
        throw ShapeMismatch("covariance size does not match mean");
}

GaussMorphism::GaussMorphism(Eigen::MatrixXd m, Eigen::VectorXd offset,
                             const Eigen::MatrixXd& noise_in)
    : M(std::move(m)), c(std::move(offset)), noise(psd_repair(noise_in)) {
    if (c.size() != M.rows() || noise.rows() != M.rows())
        throw ShapeMismatch("morphism parameter sizes disagree");
}

KalmanState::KalmanState(Eigen::VectorXd mean, const Eigen::MatrixXd& cov)
    : hbar(std::move(mean)), sigma_p(psd_repair(cov)) {
    if (sigma_p.rows() != hbar.size())
        throw ShapeMismatch("covariance size does not match mean");
}

GaussMorphism compose_gauss(const GaussMorphism& f, const GaussMorphism& g) {
    if (g.in_dim() != f.out_dim())
        throw ShapeMismatch("composition dimension mismatch");
    Eigen::MatrixXd m = g.M * f.M;
    Eigen::VectorXd c = g.M * f.c + g.c;
    Eigen::MatrixXd noise = g.M * f.noise * g.M.transpose() + g.noise;
    return GaussMorphism(std::move(m), std::move(c), noise);
}

GaussMorphism tensor_gauss(const GaussMorphism& f, const GaussMorphism& g) {
    int rows = f.out_dim() + g.out_dim();
    int cols = f.in_dim() + g.in_dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    m.topLeftCorner(f.out_dim(), f.in_dim()) = f.M;
    m.bottomRightCorner(g.out_dim(), g.in_dim()) = g.M;
    Eigen::VectorXd c(rows);
    c << f.c, g.c;
    Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(rows, rows);
    noise.topLeftCorner(f.out_dim(), f.out_dim()) = f.noise;
    noise.bottomRightCorner(g.out_dim(), g.out_dim()) = g.noise;
    return GaussMorphism(std::move(m), std::move(c), noise);
}

GaussMorphism identity_gauss(int n) {
    return GaussMorphism(Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n),
                         Eigen::MatrixXd::Zero(n, n));
}

GaussMorphism copy_gauss(int n) {
    Eigen::MatrixXd m(2 * n, n);
    m.topRows(n) = Eigen::MatrixXd::Identity(n, n);
    m.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
    return GaussMorphism(std::move(m), Eigen::VectorXd::Zero(2 * n),
                         Eigen::MatrixXd::Zero(2 * n, 2 * n));
}

GaussMorphism discard_gauss(int n) {
    return GaussMorphism(Eigen::MatrixXd::Zero(0, n), Eigen::VectorXd::Zero(0),
                         Eigen::MatrixXd::Zero(0, 0));
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rel_tol) {
    if (m.rows() == 0 || m.cols() == 0)
        return Eigen::MatrixXd::Zero(m.cols(), m.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv = svd.singularValues();
    double cutoff = rel_tol * (sv.size() ? sv.maxCoeff() : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Gaussian predict(const GaussMorphism& k, const KalmanState& state) {
    if (k.in_dim() != state.dim())
        throw ShapeMismatch("state dimension does not match morphism input");
    Eigen::VectorXd mean = k.M * state.hbar + k.c;
    Eigen::MatrixXd cov = k.M * state.sigma_p * k.M.transpose() + k.noise;
    return Gaussian(std::move(mean), cov);
}

Gaussian condition(const Gaussian& joint, const Eigen::VectorXd& o) {
    int total = joint.dim();
    int m = static_cast<int>(o.size());
    if (m > total)
        throw ShapeMismatch("observation longer than the joint");
    int n = total - m;
    Eigen::VectorXd mu_h = joint.mean.head(n);
    Eigen::VectorXd mu_o = joint.mean.tail(m);
    Eigen::MatrixXd s_hh = joint.cov.topLeftCorner(n, n);
    Eigen::MatrixXd s_ho = joint.cov.topRightCorner(n, m);
    Eigen::MatrixXd s_oo = joint.cov.bottomRightCorner(m, m);
    Eigen::MatrixXd gain = s_ho * pinv(s_oo);
    Eigen::VectorXd mean = mu_h + gain * (o - mu_o);
    Eigen::MatrixXd cov = s_hh - gain * s_ho.transpose();
    return Gaussian(std::move(mean), cov);
}

KalmanState kalman_step(const GaussMorphism& k, const KalmanState& state, const Eigen::VectorXd& o) {
    Gaussian post = condition(predict(k, state), o);
    return KalmanState(post.mean, post.cov);
}

Gaussian psi(const KalmanState& state) { return Gaussian(state.hbar, state.sigma_p); }

GaussMorphism point_morphism(const KalmanState& state) {
    return GaussMorphism(Eigen::MatrixXd::Zero(state.dim(), 0), state.hbar, state.sigma_p);
}

std::pair<GaussMorphism, GaussMorphism> filter_equation_sides(const GaussMorphism& k,
                                                              const KalmanState& state) {
    int n = state.dim();
    int m = k.out_dim() - n;
    if (k.in_dim() != n || m < 0)
        throw ShapeMismatch("morphism must map the state space to (state, observation)");

    GaussMorphism point = point_morphism(state);
    GaussMorphism left = compose_gauss(point, k);

    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(m, n + m);
    proj.rightCols(m) = Eigen::MatrixXd::Identity(m, m);
    GaussMorphism obs_marginal(std::move(proj), Eigen::VectorXd::Zero(m),
                               Eigen::MatrixXd::Zero(m, m));
    GaussMorphism emit = compose_gauss(left, obs_marginal);

    // Conditional of the predicted joint: observation |-> posterior hidden.
    Eigen::VectorXd mu_h = left.c.head(n);
    Eigen::VectorXd mu_o = left.c.tail(m);
    Eigen::MatrixXd s_ho = left.noise.topRightCorner(n, m);
    Eigen::MatrixXd s_oo = left.noise.bottomRightCorner(m, m);
    Eigen::MatrixXd gain = s_ho * pinv(s_oo);
    Eigen::MatrixXd post_cov = left.noise.topLeftCorner(n, n) - gain * s_ho.transpose();
    GaussMorphism update_then_psi(gain, mu_h - gain * mu_o, post_cov);

    GaussMorphism right = compose_gauss(compose_gauss(emit, copy_gauss(m)),
                                        tensor_gauss(update_then_psi, identity_gauss(m)));
    return {left, right};
}

bool gauss_morphism_close(const GaussMorphism& a, const GaussMorphism& b, double tol,
                          double* max_dev) {
    if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) {
        if (max_dev) *max_dev = std::numeric_limits<double>::infinity();
        return false;
    }
    double worst = 0.0;
    auto scan = [&worst](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        for (int i = 0; i < x.rows(); ++i)
            for (int j = 0; j < x.cols(); ++j) {
                double scale = std::max({1.0, std::abs(x(i, j)), std::abs(y(i, j))});
                worst = std::max(worst, std::abs(x(i, j) - y(i, j)) / scale);
            }
    };
    scan(a.M, b.M);
    scan(a.c, b.c);
    scan(a.noise, b.noise);
    if (max_dev) *max_dev = worst;
    return worst <= tol;
}

FilterEqReport verify_filter_equation(const GaussMorphism& k, const KalmanState& state,
                                      double tol) {
    auto [left, right] = filter_equation_sides(k, state);
    FilterEqReport report;
    report.ok = gauss_morphism_close(left, right, tol, &report.max_dev);
    return report;
}

}  // namespace markov

#pragma once

#include <utility>

#include <Eigen/Dense>

namespace markov {

/// Symmetrizes and validates a covariance: eigenvalues below
/// -tol*max(largest eigenvalue, 1) are hard errors (NotPsd), small negative
/// eigenvalues are clipped to zero.
Eigen::MatrixXd psd_repair(const Eigen::MatrixXd& cov, double tol = 1e-10);

/// Multivariate Gaussian with a possibly singular covariance.
struct Gaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    Gaussian(Eigen::VectorXd mean_in, const Eigen::MatrixXd& cov_in);
    int dim() const { return static_cast<int>(mean.size()); }
};

/// Affine-linear map with additive Gaussian noise: x |-> M x + c + N(0, noise).
struct GaussMorphism {
    Eigen::MatrixXd M;
    Eigen::VectorXd c;
    Eigen::MatrixXd noise;

    GaussMorphism(Eigen::MatrixXd m, Eigen::VectorXd offset, const Eigen::MatrixXd& noise_in);
    int in_dim() const { return static_cast<int>(M.cols()); }
    int out_dim() const { return static_cast<int>(M.rows()); }
};

/// Filtering state: posterior mean and covariance of the hidden vector.
struct KalmanState {
    Eigen::VectorXd hbar;
    Eigen::MatrixXd sigma_p;

    KalmanState(Eigen::VectorXd mean, const Eigen::MatrixXd& cov);
    int dim() const { return static_cast<int>(hbar.size()); }
};

/// Diagrammatic composition (f then g): M = Mg Mf, c = Mg cf + cg,
/// noise = Mg Sf Mg^T + Sg.
GaussMorphism compose_gauss(const GaussMorphism& f, const GaussMorphism& g);
GaussMorphism tensor_gauss(const GaussMorphism& f, const GaussMorphism& g);
GaussMorphism identity_gauss(int n);
GaussMorphism copy_gauss(int n);     // duplicates coordinates, zero noise
GaussMorphism discard_gauss(int n);  // n -> 0

/// Moore-Penrose pseudoinverse by SVD; singular values below
/// rel_tol * sigma_max are treated as zero.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rel_tol = 1e-12);

/// Pushes the state through a morphism with codomain blocked as (hidden, observed):
/// mean = M hbar + c, cov = M sigma_p M^T + noise. The first state-dim coordinates
/// of the codomain are the next hidden block, the rest the observation block.
Gaussian predict(const GaussMorphism& k, const KalmanState& state);

/// Conditions a joint over (hidden, observed) on an observation; the observed
/// block is the trailing o.size() coordinates. Uses the pseudoinverse, so
/// singular observation covariances are fine.
Gaussian condition(const Gaussian& joint, const Eigen::VectorXd& o);

/// predict then condition; the covariance depends only on sigma_p.
KalmanState kalman_step(const GaussMorphism& k, const KalmanState& state, const Eigen::VectorXd& o);

/// The parametrization map: (hbar, sigma_p) |-> N(hbar, sigma_p).
Gaussian psi(const KalmanState& state);

/// A state as a morphism from the zero-dimensional space (a Gaussian point).
GaussMorphism point_morphism(const KalmanState& state);

/// The two sides of the filter equation at a state, both built from
/// compose/copy/tensor of Gauss morphisms, as maps 0 -> (hidden + observed):
/// left = state ; k, right = emit the observation, copy it, update-then-
/// parametrize one copy. Equality of the (c, noise) parameters is equality of
/// the morphisms.
std::pair<GaussMorphism, GaussMorphism> filter_equation_sides(const GaussMorphism& k,
                                                              const KalmanState& state);

/// Entrywise relative comparison of two morphisms' parameters.
bool gauss_morphism_close(const GaussMorphism& a, const GaussMorphism& b, double tol,
                          double* max_dev = nullptr);

struct FilterEqReport {
    bool ok = false;
    double max_dev = 0.0;
};

FilterEqReport verify_filter_equation(const GaussMorphism& k, const KalmanState& state,
                                      double tol = 1e-9);

}  // namespace markov

#include "particle_oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "markov/random_gen.hpp"

namespace oracles {

namespace {

/// Draws from N(0, cov) through the symmetric square root; tolerates
/// positive-semidefinite covariances.
class NoiseSampler {
public:
    explicit NoiseSampler(const Eigen::MatrixXd& cov) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((cov + cov.transpose()) / 2.0);
        Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0);
        root_ = eig.eigenvectors() * vals.cwiseSqrt().asDiagonal();
    }

    Eigen::VectorXd draw(std::mt19937_64& rng) const {
        Eigen::VectorXd z(root_.cols());
        for (int i = 0; i < z.size(); ++i) z(i) = markov::rand_normal(rng);
        return root_ * z;
    }

private:
    Eigen::MatrixXd root_;
};

std::vector<int> systematic_resample(const std::vector<double>& weights, double total,
                                     std::mt19937_64& rng) {
    const int n = static_cast<int>(weights.size());
    std::vector<int> picked(static_cast<std::size_t>(n));
    const double start = markov::rand_unit(rng) / n;
    double cumulative = 0.0;
    int j = -1;
    for (int i = 0; i < n; ++i) {
        const double position = start + static_cast<double>(i) / n;
        while (cumulative <= position * total && j + 1 < n) {
            ++j;
            cumulative += weights[static_cast<std::size_t>(j)];
        }
        picked[static_cast<std::size_t>(i)] = j;
    }
    return picked;
}

}  // namespace

Eigen::VectorXd particle_posterior_mean(const markov::GaussMorphism& k,
                                        const markov::KalmanState& prior,
                                        const std::vector<Eigen::VectorXd>& observations,
                                        int particles, std::mt19937_64& rng) {
    const int n = prior.dim();
    const int m = k.out_dim() - n;
    if (m <= 0 || k.in_dim() != n)
        throw std::invalid_argument("particle_posterior_mean: malformed system");

    const Eigen::MatrixXd a_h = k.M.topRows(n);
    const Eigen::MatrixXd a_o = k.M.bottomRows(m);
    const Eigen::VectorXd c_h = k.c.head(n);
    const Eigen::VectorXd c_o = k.c.tail(m);
    const Eigen::MatrixXd s_hh = k.noise.topLeftCorner(n, n);
    const Eigen::MatrixXd s_ho = k.noise.topRightCorner(n, m);
    const Eigen::MatrixXd s_oo = k.noise.bottomRightCorner(m, m);

    const Eigen::LLT<Eigen::MatrixXd> oo(s_oo);
    if (oo.info() != Eigen::Success)
        throw std::invalid_argument("particle_posterior_mean: observation noise is singular");
    // Conditional of the step noise given its observation component.
    const Eigen::MatrixXd regress = oo.solve(s_ho.transpose()).transpose();  // s_ho s_oo^-1
    const NoiseSampler move_noise(s_hh - regress * s_ho.transpose());
    const NoiseSampler prior_noise(prior.sigma_p);

    std::vector<Eigen::VectorXd> swarm(static_cast<std::size_t>(particles));
    for (auto& h : swarm) h = prior.hbar + prior_noise.draw(rng);

    std::vector<double> logw(static_cast<std::size_t>(particles));
    std::vector<double> weights(static_cast<std::size_t>(particles));
    for (const Eigen::VectorXd& o : observations) {
        // Weight by the predictive density of o given the previous particle.
        for (std::size_t i = 0; i < swarm.size(); ++i) {
            const Eigen::VectorXd residual = o - a_o * swarm[i] - c_o;
            logw[i] = -0.5 * residual.dot(oo.solve(residual));
        }
        double peak = logw[0];
        for (double lw : logw) peak = std::max(peak, lw);
        double total = 0.0;
        for (std::size_t i = 0; i < swarm.size(); ++i) {
            weights[i] = std::exp(logw[i] - peak);
            total += weights[i];
        }

        const std::vector<int> picked = systematic_resample(weights, total, rng);
        std::vector<Eigen::VectorXd> next(swarm.size());
        for (std::size_t i = 0; i < swarm.size(); ++i) {
            const Eigen::VectorXd& h = swarm[static_cast<std::size_t>(picked[i])];
            const Eigen::VectorXd residual = o - a_o * h - c_o;
            next[i] = a_h * h + c_h + regress * residual + move_noise.draw(rng);
        }
        swarm = std::move(next);
    }

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (const auto& h : swarm) mean += h;
    return mean / static_cast<double>(particles);
}

}  // namespace oracles

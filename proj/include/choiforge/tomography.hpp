#pragma once

// Ancilla-assisted process tomography against a black-box channel:
//   1. prepare a maximally entangled (or maximum-Schmidt-number) reference/system state,
//   2. send the system half through the channel while the reference idles,
//   3. estimate the joint output by simulated state tomography and read the
//      Kraus operators off the eigendecomposition of the rescaled estimate.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "choiforge/channels.hpp"
#include "choiforge/random.hpp"

namespace choiforge {

// ---------------------------------------------------------------------------
// Black-box channel
// ---------------------------------------------------------------------------

/// A channel known only through its action on n1 x n1 operators. The only way
/// to use it is apply_to_system_half, which applies I (x) E to a bipartite
/// operator and counts how many times that happened.
class OpaqueChannel {
public:
    using Evaluator = std::function<ComplexMatrix(const ComplexMatrix&)>;

    OpaqueChannel(std::size_t input_dim, std::size_t output_dim, Evaluator evaluator)
        : input_dim_(input_dim),
          output_dim_(output_dim),
          evaluator_(std::move(evaluator)),
          evaluations_(std::make_shared<std::atomic<std::size_t>>(0)) {
        if (input_dim == 0 || output_dim == 0) {
            throw Error(ErrorKind::invalid_argument, "OpaqueChannel: dimensions must be positive");
        }
    }

    static OpaqueChannel from_kraus(KrausSet k) {
        const auto n1 = k.input_dim(), n2 = k.output_dim();
        return OpaqueChannel(n1, n2, [k = std::move(k)](const ComplexMatrix& m) { return apply_kraus(k, m); });
    }
    static OpaqueChannel from_choi(ChoiMatrix j) {
        const auto n1 = j.input_dim(), n2 = j.output_dim();
        return OpaqueChannel(n1, n2, [j = std::move(j)](const ComplexMatrix& m) { return apply_choi(j, m); });
    }
    static OpaqueChannel from_stinespring(StinespringModel s) {
        const auto n1 = s.system_dim(), n2 = s.output_dim();
        return OpaqueChannel(n1, n2,
                             [s = std::move(s)](const ComplexMatrix& m) { return apply_stinespring(s, m); });
    }

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t output_dim() const noexcept { return output_dim_; }

    /// (I (x) E)(joint) for an operator on reference (x) system, reference first.
    /// Counts as one logical evaluation of the channel.
    ComplexMatrix apply_to_system_half(const ComplexMatrix& joint, std::size_t reference_dim) const {
        const std::size_t n1 = input_dim_, n2 = output_dim_;
        if (joint.rows() != reference_dim * n1 || joint.cols() != reference_dim * n1) {
            throw Error(ErrorKind::dimension_mismatch,
                        "OpaqueChannel: joint operator " + joint.shape() + " does not match reference dim " +
                            std::to_string(reference_dim) + " and channel input dim " + std::to_string(n1));
        }
        evaluations_->fetch_add(1);
        ComplexMatrix out(reference_dim * n2, reference_dim * n2);
        for (std::size_t i = 0; i < reference_dim; ++i)
            for (std::size_t j = 0; j < reference_dim; ++j) {
                const auto image = evaluator_(joint.block(i, j, n1, n1));
                if (image.rows() != n2 || image.cols() != n2) {
                    throw Error(ErrorKind::dimension_mismatch, "OpaqueChannel: evaluator returned " + image.shape() +
                                                                   ", expected " +
                                                                   ComplexMatrix::shape_string(n2, n2));
                }
                out.set_block(i, j, image);
            }
        return out;
    }

    std::size_t evaluation_count() const noexcept { return evaluations_->load(); }

private:
    std::size_t input_dim_;
    std::size_t output_dim_;
    Evaluator evaluator_;
    std::shared_ptr<std::atomic<std::size_t>> evaluations_;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Number of repetitions per measurement setting, or the infinite-shot idealization.
class ShotBudget {
public:
    static ShotBudget exact() { return ShotBudget(); }
    static ShotBudget finite(std::uint64_t shots) {
        if (shots == 0) throw Error(ErrorKind::config, "shot count must be positive");
        return ShotBudget(shots);
    }

    bool is_exact() const noexcept { return !shots_.has_value(); }
    std::uint64_t count() const { return shots_.value(); }

    friend bool operator==(const ShotBudget&, const ShotBudget&) = default;

private:
    ShotBudget() = default;
    explicit ShotBudget(std::uint64_t shots) : shots_(shots) {}
    std::optional<std::uint64_t> shots_;
};

struct MaxEntangledInput {};

/// |phi> = sum_i alpha_i (U|i>) (x) (V|i>), reference = U factor, system = V factor.
struct SchmidtInput {
    std::vector<double> alpha;
    ComplexMatrix reference_unitary;  // U
    ComplexMatrix system_unitary;     // V
};

using InputKind = std::variant<MaxEntangledInput, SchmidtInput>;

struct TomographyConfig {
    ShotBudget shots = ShotBudget::exact();
    std::uint64_t seed = 0;
    InputKind input = MaxEntangledInput{};
    std::optional<double> kraus_threshold;  // default: see default_kraus_threshold
    bool psd_projection = true;
    unsigned threads = 0;  // 0: CHOIFORGE_THREADS, else hardware concurrency
};

namespace tolerance {
inline constexpr double schmidt_norm = 1e-10;
inline constexpr double schmidt_conditioning = 1e-6;
inline constexpr double trace_decreasing_flag = 0.999;
}  // namespace tolerance

inline void validate_schmidt_input(const SchmidtInput& s, std::size_t n1) {
    if (s.alpha.size() != n1) {
        throw Error(ErrorKind::config, "Schmidt input: expected " + std::to_string(n1) + " coefficients, got " +
                                           std::to_string(s.alpha.size()));
    }
    double norm2 = 0.0;
    for (double a : s.alpha) {
        if (!(a > 0.0)) throw Error(ErrorKind::config, "not maximum Schmidt number: coefficients must be positive");
        norm2 += a * a;
    }
    if (std::abs(norm2 - 1.0) > tolerance::schmidt_norm) {
        throw Error(ErrorKind::config, "Schmidt input: squared coefficients must sum to 1");
    }
    if (s.reference_unitary.rows() != n1 || !is_unitary(s.reference_unitary)) {
        throw Error(ErrorKind::config, "Schmidt input: U must be a " + std::to_string(n1) + "x" +
                                           std::to_string(n1) + " unitary");
    }
    if (s.system_unitary.rows() != n1 || !is_unitary(s.system_unitary)) {
        throw Error(ErrorKind::config, "Schmidt input: V must be a " + std::to_string(n1) + "x" +
                                           std::to_string(n1) + " unitary");
    }
}

inline double default_kraus_threshold(const ShotBudget& shots, std::size_t n1) {
    if (shots.is_exact()) return tolerance::kraus_drop;
    const double noise_scale = static_cast<double>(n1) / std::sqrt(static_cast<double>(shots.count()));
    return std::max(tolerance::kraus_drop, 3.0 * noise_scale);
}

inline unsigned default_thread_count() {
    if (const char* env = std::getenv("CHOIFORGE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// Input states
// ---------------------------------------------------------------------------

/// (1/sqrt(n1)) sum_i |i> (x) |i>, length n1^2.
inline ComplexMatrix prepare_max_entangled(std::size_t n1) {
    if (n1 < 2) throw Error(ErrorKind::invalid_argument, "prepare_max_entangled: dimension must be at least 2");
    ComplexMatrix v(n1 * n1, 1);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n1));
    for (std::size_t i = 0; i < n1; ++i) v(i * n1 + i, 0) = amp;
    return v;
}

inline ComplexMatrix prepare_schmidt_input(const SchmidtInput& s, std::size_t n1) {
    validate_schmidt_input(s, n1);
    ComplexMatrix v(n1 * n1, 1);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t a = 0; a < n1; ++a)
            for (std::size_t b = 0; b < n1; ++b)
                v(a * n1 + b, 0) += s.alpha[i] * s.reference_unitary(a, i) * s.system_unitary(b, i);
    return v;
}

/// (I (x) E)(|phi><phi|), computed by one call into the black box.
inline ComplexMatrix joint_output_state(const OpaqueChannel& ch, const ComplexMatrix& input_vector) {
    const std::size_t n1 = ch.input_dim();
    if (input_vector.cols() != 1 || input_vector.rows() != n1 * n1) {
        throw Error(ErrorKind::dimension_mismatch, "joint_output_state: input vector " + input_vector.shape() +
                                                       " is not a column of length " + std::to_string(n1 * n1));
    }
    return hermitian_part(ch.apply_to_system_half(outer(input_vector), n1));
}

// ---------------------------------------------------------------------------
// Simulated state tomography
// ---------------------------------------------------------------------------

/// One projective measurement: the eigenvectors of a generalized Gell-Mann
/// matrix with nonzero eigenvalue; all remaining eigenvectors (eigenvalue 0)
/// are lumped into a single residual outcome.
struct MeasurementSetting {
    ComplexMatrix observable;
    std::vector<ComplexMatrix> outcome_vectors;
    std::vector<double> outcome_values;
};

/// The d^2 - 1 traceless generalized Gell-Mann observables, normalized to Tr(G_k G_l) = 2 delta_kl.
inline std::vector<MeasurementSetting> gell_mann_settings(std::size_t d) {
    std::vector<MeasurementSetting> settings;
    settings.reserve(d * d - 1);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const cplx i_unit(0.0, 1.0);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = j + 1; k < d; ++k) {
            const auto ej = ComplexMatrix::basis_vector(d, j);
            const auto ek = ComplexMatrix::basis_vector(d, k);
            MeasurementSetting sym;
            sym.observable = ComplexMatrix::unit(d, j, k) + ComplexMatrix::unit(d, k, j);
            sym.outcome_vectors = {(ej + ek) * inv_sqrt2, (ej - ek) * inv_sqrt2};
            sym.outcome_values = {1.0, -1.0};
            settings.push_back(std::move(sym));

            MeasurementSetting anti;
            anti.observable = ComplexMatrix::unit(d, j, k) * (-i_unit) + ComplexMatrix::unit(d, k, j) * i_unit;
            anti.outcome_vectors = {(ej + ek * i_unit) * inv_sqrt2, (ej - ek * i_unit) * inv_sqrt2};
            anti.outcome_values = {1.0, -1.0};
            settings.push_back(std::move(anti));
        }
    for (std::size_t l = 1; l < d; ++l) {
        const double norm = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
        MeasurementSetting diag;
        diag.observable = ComplexMatrix(d, d);
        for (std::size_t m = 0; m <= l; ++m) {
            const double value = norm * (m < l ? 1.0 : -static_cast<double>(l));
            diag.observable(m, m) = value;
            diag.outcome_vectors.push_back(ComplexMatrix::basis_vector(d, m));
            diag.outcome_values.push_back(value);
        }
        settings.push_back(std::move(diag));
    }
    return settings;
}

namespace detail {

// Estimated <G> for one setting from `shots` preparations of a subnormalized state
// rho_sub. Each shot first survives the channel's post-selection with
// probability trace, then yields a measurement outcome on the normalized state.
struct SettingSample {
    double expectation = 0.0;
    std::uint64_t successes = 0;
};

inline SettingSample sample_setting(const MeasurementSetting& setting, const ComplexMatrix& normalized_state,
                                    double success_probability, std::uint64_t shots, std::uint64_t seed) {
    Rng rng(seed);
    SettingSample out;
    std::binomial_distribution<long long> survive(static_cast<long long>(shots), success_probability);
    out.successes = static_cast<std::uint64_t>(survive(rng));
    if (out.successes == 0) return out;

    long long remaining = static_cast<long long>(out.successes);
    double remaining_mass = 1.0;
    double sum = 0.0;
    for (std::size_t m = 0; m < setting.outcome_vectors.size() && remaining > 0; ++m) {
        const auto& e = setting.outcome_vectors[m];
        const double p = std::clamp(inner(e, multiply(normalized_state, e)).real(), 0.0, 1.0);
        const double conditional = remaining_mass > 0.0 ? std::clamp(p / remaining_mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<long long> draw(remaining, conditional);
        const long long count = draw(rng);
        sum += setting.outcome_values[m] * static_cast<double>(count);
        remaining -= count;
        remaining_mass -= p;
    }
    out.expectation = sum / static_cast<double>(out.successes);
    return out;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
}

}  // namespace detail

inline std::size_t measurement_setting_count(std::size_t d) { return d * d - 1; }

/// Simulates linear-inversion state tomography of a (possibly subnormalized)
/// density matrix. `shots` preparations are spent on each of the d^2 - 1 Gell-Mann
/// settings. Each shot is kept with probability Tr(rho); the normalized state is
/// estimated from the kept shots and rescaled by the observed success fraction.
/// The estimate is Hermitian but not necessarily positive semidefinite.
/// EXACT mode returns rho unchanged. Sampling uses one derived RNG stream per
/// setting, so the result does not depend on `threads`.
inline ComplexMatrix simulate_state_tomography(const ComplexMatrix& rho, const ShotBudget& shots, std::uint64_t seed,
                                               unsigned threads = 0) {
    const auto eig = hermitian_eig(rho);
    if (eig.min_eigenvalue() < -tolerance::positivity) {
        throw NotCompletelyPositive("simulate_state_tomography: state is not positive semidefinite",
                                    eig.min_eigenvalue());
    }
    const double trace = rho.trace().real();
    if (trace > 1.0 + 1e-9) {
        throw Error(ErrorKind::invalid_argument, "simulate_state_tomography: state trace " + std::to_string(trace) +
                                                     " exceeds 1");
    }
    if (shots.is_exact()) return rho;

    const std::size_t d = rho.rows();
    if (trace <= 0.0) return ComplexMatrix(d, d);
    const double success_probability = std::clamp(trace, 0.0, 1.0);
    const auto normalized = hermitian_part(rho) * (1.0 / trace);

    const auto settings = gell_mann_settings(d);
    std::vector<detail::SettingSample> samples(settings.size());
    detail::parallel_for(settings.size(), threads == 0 ? default_thread_count() : threads, [&](std::size_t k) {
        samples[k] = detail::sample_setting(settings[k], normalized, success_probability, shots.count(),
                                            derive_seed(seed, k));
    });

    std::uint64_t total_success = 0;
    ComplexMatrix estimate = ComplexMatrix::identity(d) * (1.0 / static_cast<double>(d));
    for (std::size_t k = 0; k < settings.size(); ++k) {
        estimate += settings[k].observable * (0.5 * samples[k].expectation);
        total_success += samples[k].successes;
    }
    const double success_fraction =
        static_cast<double>(total_success) / (static_cast<double>(shots.count()) * static_cast<double>(settings.size()));
    return hermitian_part(estimate) * success_fraction;
}

struct PsdProjection {
    ComplexMatrix matrix;
    double clipped_mass = 0.0;  // sum of |negative eigenvalues| removed
};

/// Clips negative eigenvalues to zero. Eigenvalues within round-off of zero
/// (>= -1e-12 relative) count as nonnegative; a PSD input is returned unchanged.
inline PsdProjection project_to_psd(const ComplexMatrix& m) {
    auto eig = hermitian_eig(m);
    const double floor = -1e-12 * std::max(1.0, frobenius_norm(m));
    if (eig.min_eigenvalue() >= floor) return {m, 0.0};
    double clipped = 0.0;
    for (auto& l : eig.eigenvalues) {
        if (l < 0.0) {
            clipped += -l;
            l = 0.0;
        }
    }
    return {hermitian_part(eig.reconstruct()), clipped};
}

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

struct Reconstruction {
    ChoiMatrix choi;
    KrausSet kraus;
};

/// J = n1 * rho_est; Kraus operators from its eigendecomposition.
inline Reconstruction reconstruct_from_max_entangled(const ComplexMatrix& rho_est, std::size_t n1, std::size_t n2,
                                                     double threshold = tolerance::kraus_drop) {
    ChoiMatrix j(n1, n2, hermitian_part(rho_est) * static_cast<double>(n1));
    auto kraus = choi_to_kraus(j, threshold);
    return {std::move(j), std::move(kraus)};
}

/// Undoes a Schmidt-form input: rotate by (U^dagger (x) I), divide block (i, j) by
/// alpha_i alpha_j, eigendecompose to get operators A~_k, and return A~_k V^dagger.
inline Reconstruction reconstruct_from_schmidt(const ComplexMatrix& rho_est, const SchmidtInput& input,
                                               std::size_t n2, double threshold = tolerance::kraus_drop) {
    const std::size_t n1 = input.alpha.size();
    for (double a : input.alpha) {
        if (!(a >= tolerance::schmidt_conditioning)) {
            throw Error(ErrorKind::config,
                        "reconstruct_from_schmidt: Schmidt coefficient below 1e-6 makes the rescaling ill-conditioned");
        }
    }
    if (rho_est.rows() != n1 * n2 || rho_est.cols() != n1 * n2) {
        throw Error(ErrorKind::dimension_mismatch, "reconstruct_from_schmidt: estimate " + rho_est.shape() +
                                                       " does not match dims (" + std::to_string(n1) + ", " +
                                                       std::to_string(n2) + ")");
    }
    const auto& u = input.reference_unitary;
    const auto& v = input.system_unitary;
    const auto id2 = ComplexMatrix::identity(n2);
    const auto rot = tensor_product(u, id2);
    ComplexMatrix twisted = multiply(multiply(adjoint(rot), hermitian_part(rho_est)), rot);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n1; ++j)
            twisted.set_block(i, j, twisted.block(i, j, n2, n2) * (1.0 / (input.alpha[i] * input.alpha[j])));
    // twisted is the Choi matrix of M -> E(V M V^dagger).
    const auto intermediate = choi_to_kraus(ChoiMatrix(n1, n2, hermitian_part(twisted)), threshold);
    std::vector<ComplexMatrix> ops;
    ops.reserve(intermediate.size());
    const auto v_dag = adjoint(v);
    for (const auto& a : intermediate.operators()) ops.push_back(multiply(a, v_dag));

    // J_E = (conj(V) (x) I) twisted (V^T (x) I).
    const auto back = tensor_product(conjugate(v), id2);
    ChoiMatrix j(n1, n2, hermitian_part(multiply(multiply(back, twisted), adjoint(back))));
    return {std::move(j), KrausSet(n1, n2, std::move(ops))};
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct TomographyResult {
    ChoiMatrix estimated_choi;
    KrausSet kraus;
    ComplexMatrix raw_state_estimate;
    double negativity_removed = 0.0;
    std::uint64_t shots_used = 0;  // total preparations; 0 in EXACT mode
    double success_trace = 1.0;    // trace of the estimated joint output
    bool trace_decreasing = false;  // success_trace < 0.999
    double kraus_threshold = 0.0;
};

/// Runs prepare -> joint output -> state tomography -> (PSD projection) ->
/// reconstruction. Deterministic in (cfg.seed, cfg.shots). When PSD projection
/// is on, estimated_choi is the Choi matrix of the returned Kraus set, i.e. the
/// projected estimate with eigenvalues at or below the threshold removed.
inline TomographyResult run_tomography(const OpaqueChannel& ch, const TomographyConfig& cfg) {
    const std::size_t n1 = ch.input_dim(), n2 = ch.output_dim();
    const bool schmidt = std::holds_alternative<SchmidtInput>(cfg.input);
    const auto psi = schmidt ? prepare_schmidt_input(std::get<SchmidtInput>(cfg.input), n1) : prepare_max_entangled(n1);
    if (cfg.kraus_threshold && !(*cfg.kraus_threshold >= 0.0)) {
        throw Error(ErrorKind::config, "kraus_threshold must be nonnegative");
    }

    const auto rho = joint_output_state(ch, psi);
    TomographyResult result;
    result.raw_state_estimate = simulate_state_tomography(rho, cfg.shots, cfg.seed, cfg.threads);
    result.shots_used = cfg.shots.is_exact() ? 0 : cfg.shots.count() * measurement_setting_count(n1 * n2);
    result.success_trace = result.raw_state_estimate.trace().real();
    result.trace_decreasing = result.success_trace < tolerance::trace_decreasing_flag;
    result.kraus_threshold = cfg.kraus_threshold.value_or(default_kraus_threshold(cfg.shots, n1));

    ComplexMatrix estimate = result.raw_state_estimate;
    if (cfg.psd_projection) {
        auto projected = project_to_psd(estimate);
        estimate = std::move(projected.matrix);
        result.negativity_removed = projected.clipped_mass;
    }
    auto rec = schmidt ? reconstruct_from_schmidt(estimate, std::get<SchmidtInput>(cfg.input), n2, result.kraus_threshold)
                       : reconstruct_from_max_entangled(estimate, n1, n2, result.kraus_threshold);
    result.kraus = std::move(rec.kraus);
    result.estimated_choi = cfg.psd_projection ? kraus_to_choi(result.kraus) : std::move(rec.choi);
    return result;
}

}  // namespace choiforge

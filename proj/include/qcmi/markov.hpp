#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qcmi/channels.hpp"
#include "qcmi/entropy.hpp"
#include "qcmi/states.hpp"

namespace qcmi {

/// One direct-sum block p_k rho_{C B_L} (x) rho_{B_R R}.
///
/// `left` has two subsystems, C first; `right` has two subsystems, R last.
/// The middle labels are free (only their dimensions matter).
struct MarkovBlock {
  double weight;
  MultipartiteState left;
  MultipartiteState right;
};

struct MarkovSpec {
  std::size_t c_dim = 1;
  std::size_t r_dim = 1;
  std::vector<MarkovBlock> blocks;
};

/// Where block k sits inside B: rows [offset, offset + left_dim * right_dim),
/// with B_L the more significant factor.
struct MarkovBlockLayout {
  std::size_t offset;
  std::size_t left_dim;
  std::size_t right_dim;
};

void validate(const MarkovSpec& spec);
std::vector<MarkovBlockLayout> markov_layout(const MarkovSpec& spec);

/// Quantum Markov state on (B, C, R) with B = (+)_k B_Lk (x) B_Rk, blocks laid
/// out in spec order.
MultipartiteState markov_state(const MarkovSpec& spec);

/// Random MarkovSpec whose blocks (B_L, B_R dimensions each 1 or 2) exactly
/// fill d_B = b_dim; block states are full-rank random mixed states.
MarkovSpec random_markov_spec(std::size_t c_dim, std::size_t r_dim, std::size_t b_dim,
                              SeededRng& rng);

/// Markov state with classical B: sum_k p_k |k><k|_B (x) rho_C^k (x) rho_R^k.
MarkovSpec classical_b_markov_spec(const std::vector<double>& weights,
                                   const std::vector<MultipartiteState>& c_states,
                                   const std::vector<MultipartiteState>& r_states);

/// S(rho || sigma) - I(C:R|B)_rho in bits. +infinity when the support
/// condition fails.
double markov_gap(const MultipartiteState& rho, const MultipartiteState& sigma_markov);

/// (L (x) id_R)(rho_BR) for L: B -> BC, returned on (B, C, R).
MultipartiteState reconstruct(const Channel& ch, const MultipartiteState& rho_bcr);

/// Transpose channel of rho_BC applied to rho_BR.
MultipartiteState transpose_reconstruction(const MultipartiteState& rho_bcr);

enum class ObjectiveKind { kFidelity, kRenyiHalf, kMeasuredRe };

std::string to_string(ObjectiveKind kind);
ObjectiveKind objective_from_string(const std::string& name);

struct RecoveryConfig {
  std::size_t restarts = 8;  // starts in total, the first one warm
  std::size_t max_iterations = 2000;
  double step_tolerance = 1e-9;
  std::size_t env_dim = 0;  // 0 selects d_B * d_C
  std::uint64_t seed = 0x7265636f76657279ULL;
  double fd_step = 1e-5;
  MeasuredReConfig measured{};
};

struct OptimizerResult {
  Channel best_channel;
  double best_value;
  ObjectiveKind objective_kind;
  std::vector<double> trace;  // accepted-step objective values of the best start
  std::size_t restarts_used = 0;
  bool converged = false;
  double warm_start_value = 0.0;
};

/// Value of `kind` for the reconstruction of rho_BCR by `ch` (fidelity, or
/// bits for the two divergences).
double recovery_objective(const MultipartiteState& rho_bcr, const Channel& ch, ObjectiveKind kind,
                          const MeasuredReConfig& measured = {});

/// Searches channels B -> BC through Stinespring isometries B -> B C E,
/// starting from the transpose channel and Haar-random isometries.
/// Fidelity is maximized; the two divergences are minimized.
OptimizerResult optimize_recovery(const MultipartiteState& rho_bcr, ObjectiveKind kind,
                                  const RecoveryConfig& config = {});

/// Measured relative entropy between rho_BCR and (L (x) id_R)(rho_BR), bits.
double measured_re_of_recovery(const MultipartiteState& rho_bcr, const Channel& ch,
                               const MeasuredReConfig& config = {});

}  // namespace qcmi
